"""Belief states and the flat ``domain slot-type slot-value`` string format.

A belief state is a set of (domain, slot type, slot value) triples with at
most one triple per (domain, slot type) key. Values are stored normalized so
that equality is exact string comparison. The flat string format is parsed
with longest-match resolution of multi-word slot types (e.g. ``book people``)
against the ontology.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import EmptyValueError, UnknownDomainError, UnknownSlotTypeError
from .ontology import Ontology

# Values that mean "slot not set"; they never become stored triples.
NULL_VALUES = frozenset({"", "none"})


def normalize_value(raw: str, aliases: Mapping[str, str] | None = None) -> str:
    """Canonicalize a slot value: lowercase, trim, collapse inner whitespace.

    An optional alias map (applied after the cheap canonicalization) rewrites
    whole values, e.g. ``{"centre": "center"}``. No aliases are applied by
    default. Idempotent as long as alias targets are not themselves alias
    keys; see :func:`check_alias_map`.
    """
    value = " ".join(raw.lower().split())
    if aliases:
        value = aliases.get(value, value)
    return value


def check_alias_map(aliases: Mapping[str, str]) -> Mapping[str, str]:
    """Validate that an alias map keeps normalization idempotent."""
    for key, target in aliases.items():
        if key != " ".join(key.lower().split()):
            raise ValueError(f"alias key {key!r} is not in normalized form")
        if target != " ".join(target.lower().split()):
            raise ValueError(f"alias target {target!r} is not in normalized form")
        if target in aliases and aliases[target] != target:
            raise ValueError(f"alias target {target!r} is itself rewritten")
    return aliases


@dataclass(frozen=True, order=True)
class SlotTriple:
    """One (domain, slot type, slot value) assignment with a normalized value."""

    domain: str
    slot_type: str
    slot_value: str

    def __post_init__(self):
        if not self.domain or not self.slot_type:
            raise ValueError("domain and slot_type must be nonempty")
        object.__setattr__(self, "slot_value", normalize_value(self.slot_value))
        if self.slot_value in NULL_VALUES:
            raise ValueError(f"null slot value {self.slot_value!r} cannot form a triple")

    @property
    def key(self) -> tuple[str, str]:
        return (self.domain, self.slot_type)

    def to_flat(self) -> str:
        return f"{self.domain} {self.slot_type} {self.slot_value}"


def _parse_parts(
    flat: str,
    ontology: Ontology,
    aliases: Mapping[str, str] | None = None,
) -> tuple[str, str, str]:
    """Split a flat belief string into (domain, slot_type, value).

    The value may be a null value ("none"); callers decide whether to drop it.
    """
    tokens = normalize_value(flat).split()
    if not tokens:
        raise EmptyValueError("empty belief string")
    domain = tokens[0]
    if not ontology.has_domain(domain):
        raise UnknownDomainError(f"unknown domain {domain!r} in {flat!r}")
    rest = tokens[1:]
    if not rest:
        raise UnknownSlotTypeError(f"no slot type after domain in {flat!r}")

    slot_types = ontology.slot_types(domain)
    # Longest match wins: "book people 2" resolves to slot "book people".
    for width in range(len(rest), 0, -1):
        candidate = " ".join(rest[:width])
        if candidate in slot_types:
            value_tokens = rest[width:]
            if not value_tokens:
                raise EmptyValueError(f"no value after slot type {candidate!r} in {flat!r}")
            value = normalize_value(" ".join(value_tokens), aliases)
            return domain, candidate, value
    raise UnknownSlotTypeError(f"no slot type of domain {domain!r} matches {flat!r}")


def parse_belief_string(
    flat: str,
    ontology: Ontology,
    aliases: Mapping[str, str] | None = None,
) -> Optional[SlotTriple]:
    """Parse one flat ``domain slot-type slot-value`` string.

    Returns ``None`` when the value is an explicit null ("none"): the string
    is well formed but carries no assignment. Raises ``UnknownDomainError``,
    ``UnknownSlotTypeError`` or ``EmptyValueError`` on malformed input.
    """
    domain, slot_type, value = _parse_parts(flat, ontology, aliases)
    if value in NULL_VALUES:
        return None
    return SlotTriple(domain, slot_type, value)


@dataclass(frozen=True)
class BeliefState:
    """An order-independent set of slot triples, one per (domain, slot type)."""

    triples: frozenset[SlotTriple] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "triples", frozenset(self.triples))
        keys = [t.key for t in self.triples]
        if len(keys) != len(set(keys)):
            raise ValueError("duplicate (domain, slot_type) key in belief state")

    @classmethod
    def from_triples(cls, triples: Iterable[SlotTriple]) -> "BeliefState":
        """Build a state from triples in order; later keys overwrite earlier ones."""
        by_key: dict[tuple[str, str], SlotTriple] = {}
        for triple in triples:
            by_key[triple.key] = triple
        return cls(frozenset(by_key.values()))

    @classmethod
    def from_flat_strings(
        cls,
        flats: Sequence[str],
        ontology: Ontology,
        aliases: Mapping[str, str] | None = None,
    ) -> "BeliefState":
        """Parse a sequence of flat strings into one state.

        Duplicate keys keep the last occurrence (a trailing null value removes
        the key entirely), mirroring how autoregressive decoders overwrite
        earlier mentions.
        """
        by_key: dict[tuple[str, str], str] = {}
        for flat in flats:
            domain, slot_type, value = _parse_parts(flat, ontology, aliases)
            by_key[(domain, slot_type)] = value
        return cls(
            frozenset(
                SlotTriple(domain, slot_type, value)
                for (domain, slot_type), value in by_key.items()
                if value not in NULL_VALUES
            )
        )

    def to_flat_strings(self) -> list[str]:
        """Render one flat string per triple, sorted by (domain, slot type)."""
        return [t.to_flat() for t in sorted(self.triples)]

    def get(self, domain: str, slot_type: str) -> Optional[str]:
        for triple in self.triples:
            if triple.domain == domain and triple.slot_type == slot_type:
                return triple.slot_value
        return None

    def as_dict(self) -> dict[tuple[str, str], str]:
        return {t.key: t.slot_value for t in self.triples}

    def __iter__(self) -> Iterator[SlotTriple]:
        return iter(sorted(self.triples))

    def __len__(self) -> int:
        return len(self.triples)

    def __bool__(self) -> bool:
        return bool(self.triples)


def render_belief_state(state: BeliefState) -> list[str]:
    """Flat-string rendering of a state; ``parse`` of each line round-trips."""
    return state.to_flat_strings()

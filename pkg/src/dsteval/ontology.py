"""Slot ontology: which slot types exist per domain and how they behave.

The ontology drives flat-string parsing (the set of legal slot types per
domain), entity scrambling and hallucination checks (which slots hold named
entities), and paraphrase validation (which slots are categorical).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional

from .errors import SchemaError


@dataclass(frozen=True)
class SlotSpec:
    """Descriptor of one slot type within a domain."""

    named_entity: bool = False
    categorical: bool = False
    values: tuple[str, ...] | None = None


class Ontology:
    """Immutable per-domain map of slot type -> :class:`SlotSpec`."""

    def __init__(self, domains: Mapping[str, Mapping[str, SlotSpec]]):
        self._domains = {
            domain: dict(slots) for domain, slots in sorted(domains.items())
        }

    def has_domain(self, domain: str) -> bool:
        return domain in self._domains

    def domains(self) -> list[str]:
        return list(self._domains)

    def slot_types(self, domain: str) -> frozenset[str]:
        return frozenset(self._domains.get(domain, ()))

    def get(self, domain: str, slot_type: str) -> Optional[SlotSpec]:
        return self._domains.get(domain, {}).get(slot_type)

    def is_named_entity(self, domain: str, slot_type: str) -> bool:
        spec = self.get(domain, slot_type)
        return spec is not None and spec.named_entity

    def is_categorical(self, domain: str, slot_type: str) -> bool:
        spec = self.get(domain, slot_type)
        return spec is not None and spec.categorical

    def named_entity_slots(self) -> Iterator[tuple[str, str]]:
        for domain, slots in self._domains.items():
            for slot_type, spec in slots.items():
                if spec.named_entity:
                    yield domain, slot_type

    def with_named_entity_slots(self, slots: Iterable[tuple[str, str]]) -> "Ontology":
        """Return a copy where exactly the given (domain, slot type) pairs
        are marked as named-entity slots."""
        wanted = set(slots)
        for domain, slot_type in wanted:
            if self.get(domain, slot_type) is None:
                raise SchemaError(f"override names unknown slot {domain!r}/{slot_type!r}")
        domains = {
            domain: {
                slot_type: SlotSpec(
                    named_entity=(domain, slot_type) in wanted,
                    categorical=spec.categorical,
                    values=spec.values,
                )
                for slot_type, spec in slot_specs.items()
            }
            for domain, slot_specs in self._domains.items()
        }
        return Ontology(domains)

    def to_dict(self) -> dict:
        out: dict = {}
        for domain, slots in self._domains.items():
            out[domain] = {}
            for slot_type, spec in sorted(slots.items()):
                entry: dict = {
                    "named_entity": spec.named_entity,
                    "categorical": spec.categorical,
                }
                if spec.values is not None:
                    entry["values"] = list(spec.values)
                out[domain][slot_type] = entry
        return out

    @classmethod
    def from_dict(cls, raw: Mapping) -> "Ontology":
        if not isinstance(raw, Mapping):
            raise SchemaError("ontology document must be a JSON object")
        domains: dict[str, dict[str, SlotSpec]] = {}
        for domain, slots in raw.items():
            if not isinstance(slots, Mapping):
                raise SchemaError(f"domain {domain!r} must map slot types to descriptors")
            domains[domain] = {}
            for slot_type, entry in slots.items():
                if not isinstance(entry, Mapping):
                    raise SchemaError(f"descriptor of {domain!r}/{slot_type!r} must be an object")
                values = entry.get("values")
                domains[domain][slot_type] = SlotSpec(
                    named_entity=bool(entry.get("named_entity", False)),
                    categorical=bool(entry.get("categorical", False)),
                    values=tuple(values) if values is not None else None,
                )
        return cls(domains)

    @classmethod
    def from_file(cls, path: str | Path) -> "Ontology":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"ontology file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def save(self, path: str | Path) -> None:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
        Path(path).write_text(text + "\n", encoding="utf-8")

    def __eq__(self, other) -> bool:
        return isinstance(other, Ontology) and self._domains == other._domains

    def __repr__(self) -> str:
        return f"Ontology(domains={list(self._domains)})"


def default_ontology() -> Ontology:
    """The shipped ontology: MultiWOZ few-shot domains plus hospital/police."""
    with resources.files("dsteval.data").joinpath("default_ontology.json").open(
        "r", encoding="utf-8"
    ) as handle:
        return Ontology.from_dict(json.load(handle))

"""Named-entity scrambling: swap every named entity for a random string of
the same shape, consistently across utterances and gold states.

Replacements keep token length, keep non-alphabetic characters in place, and
draw a random letter for each alphabetic position. The mapping is global and
injective, so it can be inverted to restore the original corpus exactly.
"""

from __future__ import annotations

import json
import random
import re
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..corpus import Corpus, Dialogue, Turn
from ..errors import CollisionError, SchemaError
from ..ontology import Ontology
from ..states import BeliefState, SlotTriple, normalize_value
from ..validation import check_corpus, check_seed

_WORD_CHARS = "a-z0-9"


@dataclass(frozen=True)
class EntityMap:
    """Injective, corpus-global map from original entities to replacements."""

    mapping: Mapping[str, str]
    seed: int
    scope: str = "global"

    def __post_init__(self):
        values = list(self.mapping.values())
        if len(values) != len(set(values)):
            raise SchemaError("entity map is not injective")

    def inverted(self) -> "EntityMap":
        return EntityMap(
            mapping={v: k for k, v in self.mapping.items()}, seed=self.seed, scope=self.scope
        )

    def to_dict(self) -> dict:
        return {"scope": self.scope, "seed": self.seed, "mapping": dict(sorted(self.mapping.items()))}

    @classmethod
    def from_dict(cls, raw: Mapping) -> "EntityMap":
        if not isinstance(raw, Mapping) or "mapping" not in raw:
            raise SchemaError("entity map document must carry a 'mapping' object")
        return cls(
            mapping=dict(raw["mapping"]),
            seed=int(raw.get("seed", 0)),
            scope=str(raw.get("scope", "global")),
        )

    def save(self, path: str | Path) -> None:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
        Path(path).write_text(text + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "EntityMap":
        try:
            return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"entity map file {path} is not valid JSON: {exc}") from exc


def scramble_string(value: str, rng: random.Random) -> str:
    """Randomize alphabetic characters in place; everything else is kept."""
    out = []
    for ch in value:
        if ch.isalpha():
            pool = string.ascii_uppercase if ch.isupper() else string.ascii_lowercase
            out.append(rng.choice(pool))
        else:
            out.append(ch)
    return "".join(out)


def _transfer_case(source: str, replacement: str) -> str:
    return "".join(
        rep.upper() if src.isupper() else rep for src, rep in zip(source, replacement)
    )


def _entity_pattern(entities) -> Optional[re.Pattern]:
    if not entities:
        return None
    ordered = sorted(entities, key=len, reverse=True)
    body = "|".join(re.escape(entity) for entity in ordered)
    return re.compile(
        f"(?<![{_WORD_CHARS}])(?:{body})(?![{_WORD_CHARS}])", re.IGNORECASE
    )


def apply_entity_map_to_text(text: str, mapping: Mapping[str, str]) -> str:
    pattern = _entity_pattern(mapping.keys())
    if pattern is None:
        return text

    def swap(match: re.Match) -> str:
        occurrence = match.group(0)
        replacement = mapping[normalize_value(occurrence)]
        return _transfer_case(occurrence, replacement)

    return pattern.sub(swap, text)


def apply_entity_map_to_state(
    state: BeliefState, entity_map: EntityMap, ontology: Ontology
) -> BeliefState:
    """Map named-entity slot values; other slots are untouched."""
    triples = []
    for triple in state:
        if ontology.is_named_entity(triple.domain, triple.slot_type):
            value = entity_map.mapping.get(triple.slot_value, triple.slot_value)
            triples.append(SlotTriple(triple.domain, triple.slot_type, value))
        else:
            triples.append(triple)
    return BeliefState.from_triples(triples)


def apply_entity_map(corpus: Corpus, entity_map: EntityMap, ontology: Optional[Ontology] = None) -> Corpus:
    """Deterministically apply a stored entity map to a whole corpus."""
    ontology = ontology or corpus.ontology
    dialogues = []
    for dlg in corpus.dialogues:
        turns = []
        for turn in dlg.turns:
            turns.append(
                Turn(
                    speaker=turn.speaker,
                    text=apply_entity_map_to_text(turn.text, entity_map.mapping),
                    turn_index=turn.turn_index,
                    gold_state=(
                        apply_entity_map_to_state(turn.gold_state, entity_map, ontology)
                        if turn.gold_state is not None
                        else None
                    ),
                    requires_coref=turn.requires_coref,
                )
            )
        dialogues.append(Dialogue(id=dlg.id, domains=dlg.domains, turns=tuple(turns)))
    return Corpus(corpus.name, tuple(dialogues), corpus.ontology)


def _gold_entities(dialogue: Dialogue, ontology: Ontology) -> set[str]:
    entities = set()
    for turn in dialogue.user_turns():
        for triple in turn.gold_state:
            if ontology.is_named_entity(triple.domain, triple.slot_type):
                entities.add(triple.slot_value)
    return entities


def build_entity_map(
    corpus: Corpus,
    ontology: Optional[Ontology] = None,
    seed: int = 0,
    max_retries: int = 100,
) -> EntityMap:
    """Build one injective scrambling over all gold named-entity values.

    Replacement tokens are rejected when they already occur anywhere in the
    corpus (as text tokens or entity tokens); this keeps the map invertible
    on the perturbed corpus without ambiguity.
    """
    check_seed(seed)
    ontology = ontology or corpus.ontology
    entities = set()
    for dlg in corpus.dialogues:
        entities |= _gold_entities(dlg, ontology)

    avoid = set()
    for dlg in corpus.dialogues:
        for turn in dlg.turns:
            avoid.update(normalize_value(turn.text).split())
    for entity in entities:
        avoid.update(entity.split())

    rng = random.Random(seed)
    mapping: dict[str, str] = {}
    used_tokens: set[str] = set()
    for entity in sorted(entities):
        if not any(ch.isalpha() for ch in entity):
            raise CollisionError(
                f"entity {entity!r} has no alphabetic characters to scramble"
            )
        for _ in range(max_retries):
            candidate = scramble_string(entity, rng)
            tokens = candidate.split()
            if any(t in avoid or t in used_tokens for t in tokens):
                continue
            used_tokens.update(tokens)
            mapping[entity] = candidate
            break
        else:
            raise CollisionError(
                f"could not find a collision-free scrambling for {entity!r} "
                f"within {max_retries} retries"
            )
    return EntityMap(mapping=mapping, seed=seed)


def find_orphan_entities(corpus: Corpus, ontology: Optional[Ontology] = None) -> list[tuple[str, str]]:
    """Gold named-entity values that never occur in their dialogue's text."""
    ontology = ontology or corpus.ontology
    orphans = []
    for dlg in corpus.dialogues:
        text_tokens = normalize_value(" ".join(t.text for t in dlg.turns)).split()
        joined = " ".join(text_tokens)
        for entity in sorted(_gold_entities(dlg, ontology)):
            pattern = _entity_pattern([entity])
            if pattern is None or not pattern.search(joined):
                orphans.append((dlg.id, entity))
    return orphans


class EntityScrambler(BaseEstimator, TransformerMixin):
    """Corpus transformer that replaces named entities with scrambled ones.

    ``fit`` learns the global entity map from the gold states; ``transform``
    applies it to utterances and gold states; ``inverse_transform`` restores
    the original corpus exactly.

    Attributes set by ``fit``: ``entity_map_``, ``ontology_``, ``orphans_``
    (gold entities never seen in their dialogue's text).
    """

    def __init__(self, ontology: Optional[Ontology] = None, seed: int = 0, max_retries: int = 100):
        self.ontology = ontology
        self.seed = seed
        self.max_retries = max_retries

    def fit(self, X: Corpus, y=None) -> "EntityScrambler":
        check_corpus(X)
        self.ontology_ = self.ontology or X.ontology
        self.entity_map_ = build_entity_map(
            X, self.ontology_, seed=self.seed, max_retries=self.max_retries
        )
        self.orphans_ = find_orphan_entities(X, self.ontology_)
        return self

    def transform(self, X: Corpus) -> Corpus:
        check_is_fitted(self, "entity_map_")
        check_corpus(X)
        return apply_entity_map(X, self.entity_map_, self.ontology_)

    def inverse_transform(self, X: Corpus) -> Corpus:
        check_is_fitted(self, "entity_map_")
        check_corpus(X)
        return apply_entity_map(X, self.entity_map_.inverted(), self.ontology_)


def scramble_entities(
    corpus: Corpus,
    ontology: Optional[Ontology] = None,
    seed: int = 0,
) -> tuple[Corpus, EntityMap]:
    """One-shot form of :class:`EntityScrambler`."""
    scrambler = EntityScrambler(ontology=ontology, seed=seed).fit(corpus)
    return scrambler.transform(corpus), scrambler.entity_map_

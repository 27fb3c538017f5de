"""Aligned original/perturbed sample pairs, the operand of conditional JGA."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

from .corpus import Corpus
from .errors import AlignmentError, GoldMismatchError
from .states import BeliefState

if TYPE_CHECKING:
    from .perturb.scramble import EntityMap

NAMED_ENTITY = "named_entity"
PARAPHRASE = "paraphrase"
DISFLUENCY = "disfluency"
PERTURBATION_KINDS = (NAMED_ENTITY, PARAPHRASE, DISFLUENCY)

# Perturbations that must leave the gold state untouched.
GOLD_PRESERVING_KINDS = (PARAPHRASE, DISFLUENCY)


@dataclass(frozen=True)
class EvalSample:
    """One evaluated user turn: its history and cumulative gold state."""

    dialogue_id: str
    turn_index: int
    history: tuple[str, ...]
    gold: BeliefState

    @property
    def key(self) -> tuple[str, int]:
        return (self.dialogue_id, self.turn_index)

    @property
    def turn_text(self) -> str:
        return self.history[-1]

    @property
    def history_text(self) -> str:
        return " ".join(self.history)


@dataclass(frozen=True)
class PairedSample:
    """An original sample and its perturbed counterpart, same key."""

    original: EvalSample
    perturbed: EvalSample
    kind: str

    @property
    def key(self) -> tuple[str, int]:
        return self.original.key


@dataclass(frozen=True)
class PairAlignment:
    """Alignment outcome: pairs plus the user turns left unmatched."""

    pairs: tuple[PairedSample, ...]
    unmatched_original: tuple[tuple[str, int], ...]
    unmatched_perturbed: tuple[tuple[str, int], ...]


def _samples_by_key(corpus: Corpus) -> dict[tuple[str, int], EvalSample]:
    samples = {}
    for dlg, turn in corpus.user_turns():
        samples[(dlg.id, turn.turn_index)] = EvalSample(
            dialogue_id=dlg.id,
            turn_index=turn.turn_index,
            history=dlg.history(turn.turn_index),
            gold=turn.gold_state,
        )
    return samples


def align_pairs(
    original: Corpus,
    perturbed: Corpus,
    kind: str,
    entity_map: Optional["EntityMap"] = None,
    strict: bool = True,
    check_gold: bool = True,
) -> PairAlignment:
    """Pair user turns of two corpora by (dialogue id, turn index).

    Gold invariants are enforced per perturbation kind: paraphrase and
    disfluency pairs must have identical golds; named-entity pairs are
    checked for mapped equality when ``entity_map`` is provided. With
    ``strict`` (the default) any unmatched user turn raises
    :class:`AlignmentError`. ``check_gold=False`` defers the gold check to
    a downstream validator that reports instead of raising.
    """
    if kind not in PERTURBATION_KINDS:
        raise ValueError(f"unknown perturbation kind {kind!r}")
    orig = _samples_by_key(original)
    pert = _samples_by_key(perturbed)
    shared = sorted(set(orig) & set(pert))
    missing = tuple(sorted(set(orig) - set(pert)))
    extra = tuple(sorted(set(pert) - set(orig)))
    if strict and (missing or extra):
        raise AlignmentError(missing, extra)

    pairs = tuple(PairedSample(orig[key], pert[key], kind) for key in shared)

    if check_gold:
        mismatched = []
        if kind in GOLD_PRESERVING_KINDS:
            mismatched = [p.key for p in pairs if p.original.gold != p.perturbed.gold]
        elif entity_map is not None:
            from .perturb.scramble import apply_entity_map_to_state

            for pair in pairs:
                expected = apply_entity_map_to_state(
                    pair.original.gold, entity_map, original.ontology
                )
                if expected != pair.perturbed.gold:
                    mismatched.append(pair.key)
        if mismatched:
            raise GoldMismatchError(mismatched, kind)

    return PairAlignment(pairs, missing, extra)

"""Joint goal accuracy, conditional JGA, hallucination frequency, aggregates.

All metrics reduce per-turn verdicts with plain counting, so evaluation
order never changes a result. Zero denominators raise
:class:`UndefinedMetricError` rather than returning 0 or 1; the report layer
turns that into an explicit "undefined" cell.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .corpus import Corpus, Turn
from .errors import EmptyDenominatorError, UndefinedMetricError
from .loaders import PredictionSet
from .ontology import Ontology
from .pairs import PairedSample
from .states import BeliefState, normalize_value
from .validation import check_prediction_targets, check_unit

TURN_UNIT = "turn"
DIALOGUE_UNIT = "dialogue"


@dataclass(frozen=True)
class TurnVerdict:
    """Outcome of exact-match scoring for one user turn."""

    dialogue_id: str
    turn_index: int
    correct: bool
    missing_prediction: bool = False

    def __post_init__(self):
        if self.missing_prediction and self.correct:
            raise ValueError("a missing prediction cannot be correct")


@dataclass(frozen=True)
class JgaResult:
    value: float
    correct: int
    total: int
    verdicts: tuple[TurnVerdict, ...]

    def __post_init__(self):
        if not 0 <= self.correct <= self.total:
            raise ValueError("correct count out of range")


@dataclass(frozen=True)
class CjgaResult:
    value: float
    both_correct: int
    at_least_one: int
    n_pairs: int

    def __post_init__(self):
        if not 0 <= self.both_correct <= self.at_least_one <= self.n_pairs:
            raise ValueError("pair counts out of order")


@dataclass(frozen=True)
class NohfResult:
    value: float
    contained: int
    total: int

    def __post_init__(self):
        if not 0 <= self.contained <= self.total:
            raise ValueError("containment count out of range")


def states_match(pred: Optional[BeliefState], gold: BeliefState) -> bool:
    """Exact joint match: every slot of the gold state predicted, nothing extra."""
    return pred is not None and pred == gold


def turn_verdicts(
    predictions: PredictionSet,
    corpus: Corpus,
    turn_filter: Optional[Callable[[Turn], bool]] = None,
) -> list[TurnVerdict]:
    """Score every user turn passing the filter; absent records are incorrect."""
    check_prediction_targets(predictions, corpus)
    verdicts = []
    for dlg, turn in corpus.user_turns():
        if turn_filter is not None and not turn_filter(turn):
            continue
        pred = predictions.get(dlg.id, turn.turn_index)
        verdicts.append(
            TurnVerdict(
                dialogue_id=dlg.id,
                turn_index=turn.turn_index,
                correct=states_match(pred, turn.gold_state),
                missing_prediction=pred is None,
            )
        )
    return verdicts


def _reduce_verdicts(verdicts: Sequence[TurnVerdict], unit: str) -> tuple[int, int]:
    if unit == TURN_UNIT:
        return sum(v.correct for v in verdicts), len(verdicts)
    by_dialogue: dict[str, bool] = {}
    for verdict in verdicts:
        by_dialogue[verdict.dialogue_id] = (
            by_dialogue.get(verdict.dialogue_id, True) and verdict.correct
        )
    return sum(by_dialogue.values()), len(by_dialogue)


def joint_goal_accuracy(
    predictions: PredictionSet,
    corpus: Corpus,
    turn_filter: Optional[Callable[[Turn], bool]] = None,
    unit: str = TURN_UNIT,
) -> JgaResult:
    """Fraction of evaluation units whose predicted state equals the gold.

    With ``unit="dialogue"`` a dialogue counts as correct only if all of its
    filtered user turns are correct.
    """
    check_unit(unit)
    verdicts = turn_verdicts(predictions, corpus, turn_filter)
    correct, total = _reduce_verdicts(verdicts, unit)
    if total == 0:
        raise EmptyDenominatorError("joint goal accuracy", denominator=0)
    return JgaResult(
        value=correct / total, correct=correct, total=total, verdicts=tuple(verdicts)
    )


def coref_joint_goal_accuracy(
    predictions: PredictionSet, corpus: Corpus, unit: str = TURN_UNIT
) -> JgaResult:
    """JGA restricted to turns flagged as requiring coreference resolution."""
    return joint_goal_accuracy(
        predictions, corpus, turn_filter=lambda turn: turn.requires_coref, unit=unit
    )


def conditional_jga(
    pairs: Sequence[PairedSample],
    predictions_original: PredictionSet,
    predictions_perturbed: PredictionSet,
    unit: str = TURN_UNIT,
) -> CjgaResult:
    """How often both members of a pair are correct, given at least one is.

    Pairs with no prediction record on a side count that side as incorrect.
    Raises :class:`UndefinedMetricError` when no pair has a correct member.
    """
    check_unit(unit)
    outcomes = []
    for pair in pairs:
        dialogue_id, turn_index = pair.key
        orig_ok = states_match(
            predictions_original.get(dialogue_id, turn_index), pair.original.gold
        )
        pert_ok = states_match(
            predictions_perturbed.get(dialogue_id, turn_index), pair.perturbed.gold
        )
        outcomes.append((dialogue_id, orig_ok, pert_ok))

    if unit == DIALOGUE_UNIT:
        grouped: dict[str, tuple[bool, bool]] = {}
        for dialogue_id, orig_ok, pert_ok in outcomes:
            prev = grouped.get(dialogue_id, (True, True))
            grouped[dialogue_id] = (prev[0] and orig_ok, prev[1] and pert_ok)
        outcomes = [(key, a, b) for key, (a, b) in grouped.items()]

    both = sum(1 for _, a, b in outcomes if a and b)
    either = sum(1 for _, a, b in outcomes if a or b)
    if either == 0:
        raise UndefinedMetricError("conditional JGA", numerator=both, denominator=either)
    return CjgaResult(
        value=both / either, both_correct=both, at_least_one=either, n_pairs=len(outcomes)
    )


def contains_token_span(haystack_tokens: Sequence[str], needle_tokens: Sequence[str]) -> bool:
    """True if the needle occurs as a contiguous token run in the haystack."""
    n = len(needle_tokens)
    if n == 0:
        return False
    needle = list(needle_tokens)
    return any(
        list(haystack_tokens[i : i + n]) == needle
        for i in range(len(haystack_tokens) - n + 1)
    )


def no_hallucination_frequency(
    predictions: PredictionSet,
    corpus: Corpus,
    ontology: Optional[Ontology] = None,
) -> NohfResult:
    """Fraction of predicted named-entity values present in the dialogue history.

    Counted per predicted named-entity triple. The history is every utterance
    up to and including the evaluated turn, and containment is a normalized
    token-subsequence match (substrings inside longer words do not count).
    """
    check_prediction_targets(predictions, corpus)
    ontology = ontology or corpus.ontology
    contained = 0
    total = 0
    history_cache: dict[tuple[str, int], list[str]] = {}
    dialogues = {dlg.id: dlg for dlg in corpus.dialogues}
    for (dialogue_id, turn_index), state in predictions.records.items():
        for triple in state:
            if not ontology.is_named_entity(triple.domain, triple.slot_type):
                continue
            total += 1
            key = (dialogue_id, turn_index)
            if key not in history_cache:
                history = dialogues[dialogue_id].history(turn_index)
                history_cache[key] = normalize_value(" ".join(history)).split()
            if contains_token_span(history_cache[key], triple.slot_value.split()):
                contained += 1
    if total == 0:
        raise UndefinedMetricError(
            "no-hallucination frequency", numerator=contained, denominator=total
        )
    return NohfResult(value=contained / total, contained=contained, total=total)


@dataclass(frozen=True)
class AggregateStat:
    """Median and population standard deviation over runs."""

    median: Optional[float]
    std: Optional[float]
    n_used: int
    n_excluded: int


def aggregate_runs(values: Iterable[Optional[float]]) -> AggregateStat:
    """Aggregate one metric over runs: median (average of the two middle
    values for even counts) and population standard deviation.

    ``None`` entries (undefined runs) are excluded and counted.
    """
    values = list(values)
    kept = [v for v in values if v is not None]
    excluded = len(values) - len(kept)
    if not kept:
        return AggregateStat(median=None, std=None, n_used=0, n_excluded=excluded)
    return AggregateStat(
        median=float(statistics.median(kept)),
        std=float(statistics.pstdev(kept)),
        n_used=len(kept),
        n_excluded=excluded,
    )

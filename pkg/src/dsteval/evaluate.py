"""One evaluation run: corpus + predictions (+ perturbed pairs) -> report.

Metrics whose inputs are absent come back "not evaluated"; metrics whose
denominator is empty come back "undefined". Neither is ever folded into 0.0.
"""

from __future__ import annotations

from typing import Mapping, Optional

from .corpus import Corpus
from .errors import UndefinedMetricError
from .loaders import PredictionSet
from .metrics import (
    conditional_jga,
    coref_joint_goal_accuracy,
    joint_goal_accuracy,
    no_hallucination_frequency,
)
from .pairs import NAMED_ENTITY, PERTURBATION_KINDS, align_pairs
from .perturb.scramble import EntityMap
from .report import MetricValue, RunReport

_CJGA_KEYS = {kind: f"cjga_{kind}" for kind in PERTURBATION_KINDS}


def _jga_cell(result) -> MetricValue:
    return MetricValue.ok(result.value, result.correct, result.total)


def evaluate_run(
    corpus: Corpus,
    predictions: PredictionSet,
    perturbed: Optional[Mapping[str, Corpus]] = None,
    perturbed_predictions: Optional[Mapping[str, PredictionSet]] = None,
    entity_map: Optional[EntityMap] = None,
    unit: str = "turn",
    config_hash_value: str = "",
) -> RunReport:
    """Compute every metric for which inputs exist.

    ``perturbed`` and ``perturbed_predictions`` map a perturbation kind to
    its corpus and prediction set; a conditional JGA is computed only when
    both are present for a kind.
    """
    perturbed = dict(perturbed or {})
    perturbed_predictions = dict(perturbed_predictions or {})
    metrics: dict[str, MetricValue] = {}

    try:
        metrics["jga"] = _jga_cell(joint_goal_accuracy(predictions, corpus, unit=unit))
    except UndefinedMetricError as exc:
        metrics["jga"] = MetricValue.undefined(exc.numerator, exc.denominator)

    if any(turn.requires_coref for _, turn in corpus.user_turns()):
        metrics["coref_jga"] = _jga_cell(
            coref_joint_goal_accuracy(predictions, corpus, unit=unit)
        )
    else:
        metrics["coref_jga"] = MetricValue.not_evaluated()

    try:
        nohf = no_hallucination_frequency(predictions, corpus)
        metrics["nohf_orig"] = MetricValue.ok(nohf.value, nohf.contained, nohf.total)
    except UndefinedMetricError as exc:
        metrics["nohf_orig"] = MetricValue.undefined(exc.numerator, exc.denominator)

    metrics["nohf_swap"] = MetricValue.not_evaluated()
    if NAMED_ENTITY in perturbed and NAMED_ENTITY in perturbed_predictions:
        try:
            swap = no_hallucination_frequency(
                perturbed_predictions[NAMED_ENTITY], perturbed[NAMED_ENTITY]
            )
            metrics["nohf_swap"] = MetricValue.ok(swap.value, swap.contained, swap.total)
        except UndefinedMetricError as exc:
            metrics["nohf_swap"] = MetricValue.undefined(exc.numerator, exc.denominator)

    for kind in PERTURBATION_KINDS:
        key = _CJGA_KEYS[kind]
        if kind not in perturbed or kind not in perturbed_predictions:
            metrics[key] = MetricValue.not_evaluated()
            continue
        alignment = align_pairs(
            corpus,
            perturbed[kind],
            kind,
            entity_map=entity_map if kind == NAMED_ENTITY else None,
        )
        try:
            result = conditional_jga(
                alignment.pairs, predictions, perturbed_predictions[kind], unit=unit
            )
            metrics[key] = MetricValue.ok(
                result.value, result.both_correct, result.at_least_one
            )
        except UndefinedMetricError as exc:
            metrics[key] = MetricValue.undefined(exc.numerator, exc.denominator)

    return RunReport(
        model_name=predictions.model_name,
        seed_label=predictions.seed_label,
        config_hash=config_hash_value,
        metrics=metrics,
    )

"""Input validation helpers, in the spirit of ``sklearn.utils.validation``."""

from __future__ import annotations

from typing import TYPE_CHECKING

from .errors import PredictionTargetError, SchemaError

if TYPE_CHECKING:
    from .corpus import Corpus
    from .loaders import PredictionSet

VALID_UNITS = ("turn", "dialogue")


def check_unit(unit: str) -> str:
    if unit not in VALID_UNITS:
        raise ValueError(f"unit must be one of {VALID_UNITS}, got {unit!r}")
    return unit


def check_seed(seed) -> int:
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    return seed


def check_probability(value, name: str) -> float:
    if not isinstance(value, (int, float)) or not 0.0 <= float(value) <= 1.0:
        raise ValueError(f"{name} must be a probability in [0, 1], got {value!r}")
    return float(value)


def check_prediction_targets(predictions: "PredictionSet", corpus: "Corpus") -> None:
    """Every prediction key must name a user turn of the target corpus."""
    known = corpus.user_turn_keys()
    stray = sorted(key for key in predictions.records if key not in known)
    if stray:
        raise PredictionTargetError(stray)


def check_corpus(corpus: "Corpus") -> "Corpus":
    """Re-assert corpus invariants on an already-built object.

    Construction enforces them too; this guards call sites that accept
    arbitrary objects, e.g. estimator ``fit``/``transform`` inputs.
    """
    from .corpus import Corpus

    if not isinstance(corpus, Corpus):
        raise SchemaError(f"expected a Corpus, got {type(corpus).__name__}")
    for dlg in corpus.dialogues:
        for turn in dlg.turns:
            if turn.is_user:
                for triple in turn.gold_state:
                    if corpus.ontology.get(triple.domain, triple.slot_type) is None:
                        raise SchemaError(
                            f"gold triple {triple.to_flat()!r} in dialogue {dlg.id!r} "
                            "is not in the ontology"
                        )
    return corpus

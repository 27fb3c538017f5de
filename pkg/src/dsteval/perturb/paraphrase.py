"""Validation of ingested paraphrase pairs.

Paraphrases are produced elsewhere; this module only checks that a
paraphrased corpus is usable for invariance scoring: golds identical, and
every non-categorical slot value stated in the original turn still stated in
the paraphrase. It also reports how aggressively each paraphrase rewrites
the original wording.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ..metrics import contains_token_span
from ..ontology import Ontology
from ..pairs import PARAPHRASE, PairedSample
from ..states import normalize_value


@dataclass(frozen=True)
class PairVerdict:
    dialogue_id: str
    turn_index: int
    valid: bool
    reasons: tuple[str, ...]
    replacement_rate: float


@dataclass(frozen=True)
class ParaphraseReport:
    verdicts: tuple[PairVerdict, ...]

    @property
    def n_valid(self) -> int:
        return sum(1 for v in self.verdicts if v.valid)

    @property
    def n_invalid(self) -> int:
        return len(self.verdicts) - self.n_valid

    @property
    def mean_replacement_rate(self) -> Optional[float]:
        if not self.verdicts:
            return None
        return sum(v.replacement_rate for v in self.verdicts) / len(self.verdicts)

    def invalid(self) -> list[PairVerdict]:
        return [v for v in self.verdicts if not v.valid]

    def to_dict(self) -> dict:
        return {
            "n_pairs": len(self.verdicts),
            "n_valid": self.n_valid,
            "n_invalid": self.n_invalid,
            "mean_replacement_rate": self.mean_replacement_rate,
            "invalid_pairs": [
                {
                    "dialogue_id": v.dialogue_id,
                    "turn_index": v.turn_index,
                    "reasons": list(v.reasons),
                }
                for v in self.invalid()
            ],
        }


def word_replacement_rate(original_text: str, paraphrase_text: str) -> float:
    """Fraction of original words that do not survive into the paraphrase."""
    original = normalize_value(original_text).split()
    if not original:
        return 0.0
    kept = set(normalize_value(paraphrase_text).split())
    return sum(1 for token in original if token not in kept) / len(original)


def validate_paraphrase_pairs(
    pairs: Sequence[PairedSample], ontology: Ontology
) -> ParaphraseReport:
    """Check each paraphrase pair and report invalid ones with reasons.

    A pair is valid iff the golds are identical and every non-categorical
    gold slot value that appears in the original turn's text (as a token
    run) also appears in the paraphrased turn's text. Categorical values
    ("dontcare", yes/no, ...) legitimately never appear verbatim and are
    not checked.
    """
    verdicts = []
    for pair in pairs:
        if pair.kind != PARAPHRASE:
            raise ValueError(f"pair {pair.key} has kind {pair.kind!r}, expected paraphrase")
        reasons = []
        if pair.original.gold != pair.perturbed.gold:
            reasons.append("gold-mismatch")
        original_tokens = normalize_value(pair.original.turn_text).split()
        perturbed_tokens = normalize_value(pair.perturbed.turn_text).split()
        for triple in pair.original.gold:
            if ontology.is_categorical(triple.domain, triple.slot_type):
                continue
            value_tokens = triple.slot_value.split()
            if contains_token_span(original_tokens, value_tokens) and not contains_token_span(
                perturbed_tokens, value_tokens
            ):
                reasons.append(f"missing-value: {triple.to_flat()}")
        verdicts.append(
            PairVerdict(
                dialogue_id=pair.original.dialogue_id,
                turn_index=pair.original.turn_index,
                valid=not reasons,
                reasons=tuple(reasons),
                replacement_rate=word_replacement_rate(
                    pair.original.turn_text, pair.perturbed.turn_text
                ),
            )
        )
    return ParaphraseReport(tuple(verdicts))

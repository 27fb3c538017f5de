"""Regex heuristic for flagging user turns that need coreference resolution.

Useful when a corpus lacks gold coreference annotations. The heuristic is
high precision but potentially low recall, so it only ever adds flags.
"""

from __future__ import annotations

import re
from typing import Sequence

from .corpus import Corpus, Dialogue, Turn
from .errors import BadPatternError

# "same day as the restaurant booking", "same area as the hotel", ...
DEFAULT_COREF_PATTERNS = (
    r"\bsame\s+\w+(?:\s+\w+)?\s+as\b",
    r"\bthe\s+same\s+(?:day|time|area|place|part\s+of\s+town|price\s*range|group)\b",
)

PRECISION_CAVEAT = "coref flags from regex heuristic: high precision, potentially low recall"


def tag_coreferences(
    corpus: Corpus,
    patterns: Sequence[str] = DEFAULT_COREF_PATTERNS,
) -> Corpus:
    """Set ``requires_coref`` on user turns matching any pattern.

    Existing flags are never cleared, so repeated tagging is monotone.
    """
    if not patterns:
        raise BadPatternError("at least one pattern is required")
    try:
        compiled = [re.compile(pattern, re.IGNORECASE) for pattern in patterns]
    except re.error as exc:
        raise BadPatternError(f"bad coreference pattern: {exc}") from exc

    dialogues = []
    for dlg in corpus.dialogues:
        turns = []
        for turn in dlg.turns:
            if (
                turn.is_user
                and not turn.requires_coref
                and any(rx.search(turn.text) for rx in compiled)
            ):
                turn = Turn(
                    speaker=turn.speaker,
                    text=turn.text,
                    turn_index=turn.turn_index,
                    gold_state=turn.gold_state,
                    requires_coref=True,
                )
            turns.append(turn)
        dialogues.append(Dialogue(id=dlg.id, domains=dlg.domains, turns=tuple(turns)))

    tagged = Corpus(corpus.name, tuple(dialogues), corpus.ontology, corpus.notes)
    if PRECISION_CAVEAT not in tagged.notes:
        tagged = tagged.with_notes(PRECISION_CAVEAT)
    return tagged

"""Exception hierarchy shared across the package.

Every error raised on bad data derives from :class:`DstEvalError` so the
command line surface can map them to a single exit code.
"""

from __future__ import annotations


class DstEvalError(Exception):
    """Base class for all data and usage errors raised by this package."""


class SchemaError(DstEvalError):
    """A document does not conform to the expected schema."""


class ParseError(DstEvalError):
    """A flat belief string could not be parsed.

    Carries optional location context so loaders can point at the offending
    dialogue turn or file line.
    """

    def __init__(self, message, *, dialogue_id=None, turn_index=None, line_no=None):
        self.dialogue_id = dialogue_id
        self.turn_index = turn_index
        self.line_no = line_no
        super().__init__(self._located(message))

    def _located(self, message):
        parts = []
        if self.dialogue_id is not None:
            parts.append(f"dialogue {self.dialogue_id!r}")
        if self.turn_index is not None:
            parts.append(f"turn {self.turn_index}")
        if self.line_no is not None:
            parts.append(f"line {self.line_no}")
        if parts:
            return f"{message} ({', '.join(parts)})"
        return message


class UnknownDomainError(ParseError):
    """First token of a belief string is not a domain in the ontology."""


class UnknownSlotTypeError(ParseError):
    """No slot type of the domain matches the tokens after the domain."""


class EmptyValueError(ParseError):
    """Nothing remains for the slot value after the slot type tokens."""


class DuplicateKeyError(DstEvalError):
    """Two prediction records share the same (dialogue_id, turn_index)."""


class PredictionTargetError(DstEvalError):
    """A prediction record refers to a turn absent from the target corpus."""

    def __init__(self, keys):
        self.keys = tuple(keys)
        shown = ", ".join(f"{d}:{t}" for d, t in self.keys[:5])
        more = "" if len(self.keys) <= 5 else f" (+{len(self.keys) - 5} more)"
        super().__init__(f"predictions target unknown user turns: {shown}{more}")


class AlignmentError(DstEvalError):
    """Original and perturbed corpora do not cover the same user turns."""

    def __init__(self, missing, extra):
        self.missing = tuple(missing)
        self.extra = tuple(extra)
        super().__init__(
            f"unmatched user turns: {len(self.missing)} missing from perturbed, "
            f"{len(self.extra)} extra in perturbed"
        )


class GoldMismatchError(DstEvalError):
    """Paired samples whose gold states must agree do not."""

    def __init__(self, keys, kind):
        self.keys = tuple(keys)
        self.kind = kind
        shown = ", ".join(f"{d}:{t}" for d, t in self.keys[:5])
        super().__init__(f"gold mismatch for {kind} pairs at: {shown}")


class BadPatternError(DstEvalError):
    """A coreference heuristic pattern is empty or not a valid regex."""


class UndefinedMetricError(DstEvalError):
    """A metric's denominator is zero; the value is undefined, not 0 or 1."""

    def __init__(self, metric, numerator=0, denominator=0):
        self.metric = metric
        self.numerator = numerator
        self.denominator = denominator
        super().__init__(f"{metric} is undefined: denominator is 0")


class EmptyDenominatorError(UndefinedMetricError):
    """No turn passed the accuracy filter."""


class CollisionError(DstEvalError):
    """No injective scrambling could be found within the retry budget."""


class TargetUnreachableError(DstEvalError):
    """Disfluency probabilities cannot reach the target word-increase ratio."""


class NoDistractorError(DstEvalError):
    """A self-repair needs an alternative slot value but none exists."""


class InsufficientDialoguesError(DstEvalError):
    """A domain lacks enough single-domain dialogues for the requested split."""

    def __init__(self, domain, needed, available):
        self.domain = domain
        self.needed = needed
        self.available = available
        super().__init__(
            f"domain {domain!r} has {available} single-domain dialogues, "
            f"needs {needed}"
        )


class SchemaMismatchError(DstEvalError):
    """Report files with incompatible schema versions cannot be merged."""

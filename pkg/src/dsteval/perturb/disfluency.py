"""Speech-disfluency insertion: fillers, repetitions, restarts, self-repairs.

Insertions touch user utterances only and never change gold states. A
self-repair places a distractor value and a repair phrase immediately before
the true value ("... london no i meant cambridge"), so the last-stated value
is always the gold one. Every inserted span is logged; removing the logged
spans restores the original text byte for byte.

Calibration: each candidate insertion site draws a fixed uniform from the
turn's seeded generator, so the set of fired sites is monotone in one global
scale. ``fit`` picks the scale whose realized corpus word-increase ratio is
closest to the target (default +30.4%) and fails if no scale lands within
the configured tolerance.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..corpus import Corpus, Dialogue, Turn
from ..errors import NoDistractorError, SchemaError, TargetUnreachableError
from ..states import normalize_value
from ..validation import check_corpus, check_probability, check_seed

DEFAULT_FILLERS = ("uh", "um", "well", "you know", "i mean", "actually")
DEFAULT_REPAIR_PHRASES = ("no i meant", "no wait i meant", "sorry i meant")

FILLER = "filler"
REPETITION = "repetition"
RESTART = "restart"
REPAIR = "self-repair"

# Left-to-right order when several insertions land before the same token.
_PRIORITY = {RESTART: 0, FILLER: 1, REPETITION: 2, REPAIR: 3}


@dataclass(frozen=True)
class DisfluencyConfig:
    """Insertion probabilities and lexicons; all rates are pre-calibration.

    Default rates follow the usual frequency ordering of conversational
    speech (fillers most common, then repetitions and restarts); the
    calibration pass rescales them jointly to hit ``target_ratio``.
    """

    filler_prob: float = 0.10
    repetition_prob: float = 0.04
    restart_prob: float = 0.25
    repair_prob: float = 0.40
    filler_lexicon: tuple[str, ...] = DEFAULT_FILLERS
    repair_phrases: tuple[str, ...] = DEFAULT_REPAIR_PHRASES
    target_ratio: float = 0.304
    tolerance: float = 0.02
    max_restart_tokens: int = 3
    seed: int = 0
    extra_distractors: Mapping[str, Mapping[str, tuple[str, ...]]] = field(
        default_factory=dict
    )

    def __post_init__(self):
        for name in ("filler_prob", "repetition_prob", "restart_prob", "repair_prob"):
            check_probability(getattr(self, name), name)
        if self.target_ratio <= 0:
            raise ValueError("target_ratio must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if not self.filler_lexicon or not self.repair_phrases:
            raise ValueError("filler lexicon and repair phrases must be nonempty")
        check_seed(self.seed)

    def to_dict(self) -> dict:
        return {
            "filler_prob": self.filler_prob,
            "repetition_prob": self.repetition_prob,
            "restart_prob": self.restart_prob,
            "repair_prob": self.repair_prob,
            "filler_lexicon": list(self.filler_lexicon),
            "repair_phrases": list(self.repair_phrases),
            "target_ratio": self.target_ratio,
            "tolerance": self.tolerance,
            "max_restart_tokens": self.max_restart_tokens,
            "seed": self.seed,
            "extra_distractors": {
                domain: {slot: list(values) for slot, values in slots.items()}
                for domain, slots in self.extra_distractors.items()
            },
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "DisfluencyConfig":
        known = {
            "filler_prob",
            "repetition_prob",
            "restart_prob",
            "repair_prob",
            "filler_lexicon",
            "repair_phrases",
            "target_ratio",
            "tolerance",
            "max_restart_tokens",
            "seed",
            "extra_distractors",
        }
        unknown = set(raw) - known
        if unknown:
            raise SchemaError(f"unknown disfluency config keys: {sorted(unknown)}")
        kwargs = dict(raw)
        if "filler_lexicon" in kwargs:
            kwargs["filler_lexicon"] = tuple(kwargs["filler_lexicon"])
        if "repair_phrases" in kwargs:
            kwargs["repair_phrases"] = tuple(kwargs["repair_phrases"])
        if "extra_distractors" in kwargs:
            kwargs["extra_distractors"] = {
                domain: {slot: tuple(values) for slot, values in slots.items()}
                for domain, slots in kwargs["extra_distractors"].items()
            }
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> "DisfluencyConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"config file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def save(self, path: str | Path) -> None:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
        Path(path).write_text(text + "\n", encoding="utf-8")


@dataclass(frozen=True)
class InsertionSpan:
    """One logged insertion, as character offsets in the perturbed text."""

    dialogue_id: str
    turn_index: int
    span_start: int
    span_end: int
    kind: str

    def to_dict(self) -> dict:
        return {
            "dialogue_id": self.dialogue_id,
            "turn_index": self.turn_index,
            "span_start": self.span_start,
            "span_end": self.span_end,
            "kind": self.kind,
        }


@dataclass(frozen=True)
class _Site:
    dialogue_id: str
    turn_index: int
    offset: int
    kind: str
    insert_text: str
    prob: float
    u: float

    @property
    def threshold(self) -> float:
        if self.prob <= 0:
            return math.inf
        return self.u / self.prob

    @property
    def words(self) -> int:
        return len(self.insert_text.split())


def _turn_rng(seed: int, dialogue_id: str, turn_index: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}|{dialogue_id}|{turn_index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _value_inventory(corpus: Corpus, extra: Mapping) -> dict[tuple[str, str], list[str]]:
    inventory: dict[tuple[str, str], set[str]] = {}
    for _, turn in corpus.user_turns():
        for triple in turn.gold_state:
            inventory.setdefault(triple.key, set()).add(triple.slot_value)
    for domain, slots in extra.items():
        for slot_type, values in slots.items():
            inventory.setdefault((domain, slot_type), set()).update(
                normalize_value(v) for v in values
            )
    return {key: sorted(values) for key, values in inventory.items()}


def _value_occurrences(text: str, value: str) -> list[tuple[int, int]]:
    pattern = re.compile(
        rf"(?<![a-z0-9]){re.escape(value)}(?![a-z0-9])", re.IGNORECASE
    )
    return [(m.start(), m.end()) for m in pattern.finditer(text)]


def _plan_value_sites(
    text: str, values: Iterable[str]
) -> tuple[dict[str, int], list[tuple[int, int]]]:
    """Pick, per stated value, an insertion point that splits no value mention.

    Returns the chosen repair offsets and every value-occurrence interval
    (insertions strictly inside any of these would cut a mention in half,
    e.g. an area value quoted inside a longer venue name).
    """
    occurrences = {value: _value_occurrences(text, value) for value in set(values)}
    intervals = [iv for ivs in occurrences.values() for iv in ivs]
    offsets: dict[str, int] = {}
    for value, ivs in occurrences.items():
        for start, _ in ivs:
            inside_other = any(
                s < start < e
                for other, other_ivs in occurrences.items()
                if other != value
                for s, e in other_ivs
            )
            if not inside_other:
                offsets[value] = start
                break
    return offsets, intervals


def _splits_a_mention(offset: int, intervals: Sequence[tuple[int, int]]) -> bool:
    return any(s < offset < e for s, e in intervals)


def _enumerate_turn_sites(
    dialogue: Dialogue,
    turn: Turn,
    config: DisfluencyConfig,
    inventory: Mapping[tuple[str, str], list[str]],
) -> list[_Site]:
    tokens = list(re.finditer(r"\S+", turn.text))
    if not tokens:
        return []
    rng = _turn_rng(config.seed, dialogue.id, turn.turn_index)
    sites: list[_Site] = []
    repair_offsets, value_intervals = _plan_value_sites(
        turn.text, (t.slot_value for t in turn.gold_state)
    )

    u_restart = rng.random()
    u_restart_len = rng.random()
    if config.restart_prob > 0:
        k = min(1 + int(u_restart_len * config.max_restart_tokens), len(tokens))
        prefix = " ".join(m.group() for m in tokens[:k])
        sites.append(
            _Site(
                dialogue_id=dialogue.id,
                turn_index=turn.turn_index,
                offset=tokens[0].start(),
                kind=RESTART,
                insert_text=prefix,
                prob=config.restart_prob,
                u=u_restart,
            )
        )

    for match in tokens:
        u_fill = rng.random()
        u_fill_pick = rng.random()
        u_rep = rng.random()
        if _splits_a_mention(match.start(), value_intervals):
            continue
        if config.filler_prob > 0:
            filler = config.filler_lexicon[
                int(u_fill_pick * len(config.filler_lexicon)) % len(config.filler_lexicon)
            ]
            sites.append(
                _Site(
                    dialogue_id=dialogue.id,
                    turn_index=turn.turn_index,
                    offset=match.start(),
                    kind=FILLER,
                    insert_text=filler,
                    prob=config.filler_prob,
                    u=u_fill,
                )
            )
        if config.repetition_prob > 0:
            sites.append(
                _Site(
                    dialogue_id=dialogue.id,
                    turn_index=turn.turn_index,
                    offset=match.start(),
                    kind=REPETITION,
                    insert_text=match.group(),
                    prob=config.repetition_prob,
                    u=u_rep,
                )
            )

    if config.repair_prob > 0:
        for triple in turn.gold_state:
            offset = repair_offsets.get(triple.slot_value)
            if offset is None:
                continue
            u_repair = rng.random()
            u_pick = rng.random()
            u_phrase = rng.random()
            alternatives = [
                v for v in inventory.get(triple.key, []) if v != triple.slot_value
            ]
            if not alternatives:
                raise NoDistractorError(
                    f"self-repair scheduled for {triple.to_flat()!r} in dialogue "
                    f"{dialogue.id!r} turn {turn.turn_index}, but no alternative "
                    f"value exists for slot {triple.domain!r}/{triple.slot_type!r}"
                )
            distractor = alternatives[int(u_pick * len(alternatives)) % len(alternatives)]
            phrase = config.repair_phrases[
                int(u_phrase * len(config.repair_phrases)) % len(config.repair_phrases)
            ]
            sites.append(
                _Site(
                    dialogue_id=dialogue.id,
                    turn_index=turn.turn_index,
                    offset=offset,
                    kind=REPAIR,
                    insert_text=f"{distractor} {phrase}",
                    prob=config.repair_prob,
                    u=u_repair,
                )
            )
    return sites


def _enumerate_sites(corpus: Corpus, config: DisfluencyConfig) -> tuple[list[_Site], int]:
    inventory = _value_inventory(corpus, config.extra_distractors)
    sites: list[_Site] = []
    total_words = 0
    for dlg in corpus.dialogues:
        for turn in dlg.user_turns():
            total_words += len(turn.text.split())
            sites.extend(_enumerate_turn_sites(dlg, turn, config, inventory))
    return sites, total_words


def _calibrate(
    sites: Sequence[_Site], total_words: int, config: DisfluencyConfig
) -> tuple[Optional[float], float]:
    """Pick the firing scale whose realized ratio is closest to the target."""
    finite = sorted(
        (site for site in sites if math.isfinite(site.threshold)),
        key=lambda site: site.threshold,
    )
    if not finite or total_words == 0:
        if total_words == 0:
            return None, 0.0
        raise TargetUnreachableError(
            "no insertion site has a positive probability; cannot reach "
            f"target ratio {config.target_ratio:.3f}"
        )

    candidates: list[tuple[Optional[float], float]] = [(None, 0.0)]
    added = 0
    index = 0
    while index < len(finite):
        threshold = finite[index].threshold
        while index < len(finite) and finite[index].threshold == threshold:
            added += finite[index].words
            index += 1
        candidates.append((threshold, added / total_words))

    best_scale, best_ratio = min(
        candidates, key=lambda item: (abs(item[1] - config.target_ratio), item[1])
    )
    if abs(best_ratio - config.target_ratio) > config.tolerance:
        raise TargetUnreachableError(
            f"closest achievable word-increase ratio is {best_ratio:.4f}, outside "
            f"{config.target_ratio:.4f} +/- {config.tolerance:.4f}"
        )
    return best_scale, best_ratio


def _apply_sites(
    turn: Turn, fired: Sequence[_Site], dialogue_id: str
) -> tuple[Turn, list[InsertionSpan]]:
    ordered = sorted(fired, key=lambda s: (s.offset, _PRIORITY[s.kind]))
    out: list[str] = []
    spans: list[InsertionSpan] = []
    cursor = 0
    length = 0
    for site in ordered:
        chunk = turn.text[cursor : site.offset]
        out.append(chunk)
        length += len(chunk)
        inserted = site.insert_text + " "
        spans.append(
            InsertionSpan(
                dialogue_id=dialogue_id,
                turn_index=turn.turn_index,
                span_start=length,
                span_end=length + len(inserted),
                kind=site.kind,
            )
        )
        out.append(inserted)
        length += len(inserted)
        cursor = site.offset
    out.append(turn.text[cursor:])
    return replace(turn, text="".join(out)), spans


class DisfluencyInserter(BaseEstimator, TransformerMixin):
    """Corpus transformer that adds speech disfluencies to user turns.

    ``fit`` calibrates the insertion scale against the configured target
    word-increase ratio on the given corpus; ``transform`` applies the
    calibrated insertions. After ``transform``, ``insertion_log_`` holds the
    spans needed to restore the input exactly and ``achieved_ratio_`` the
    realized word-increase ratio.

    When every probability in the config is zero the transform is the
    identity and no calibration is attempted.
    """

    def __init__(self, config: Optional[DisfluencyConfig] = None):
        self.config = config

    def _config(self) -> DisfluencyConfig:
        return self.config if self.config is not None else DisfluencyConfig()

    def fit(self, X: Corpus, y=None) -> "DisfluencyInserter":
        check_corpus(X)
        config = self._config()
        sites, total_words = _enumerate_sites(X, config)
        if all(site.prob <= 0 for site in sites):
            self.scale_, self.ratio_ = None, 0.0
        else:
            self.scale_, self.ratio_ = _calibrate(sites, total_words, config)
        return self

    def transform(self, X: Corpus) -> Corpus:
        check_is_fitted(self, "scale_")
        check_corpus(X)
        config = self._config()
        inventory = _value_inventory(X, config.extra_distractors)
        log: list[InsertionSpan] = []
        added = 0
        total = 0
        dialogues = []
        for dlg in X.dialogues:
            turns = []
            for turn in dlg.turns:
                if not turn.is_user:
                    turns.append(turn)
                    continue
                total += len(turn.text.split())
                sites = _enumerate_turn_sites(dlg, turn, config, inventory)
                fired = [
                    s
                    for s in sites
                    if self.scale_ is not None and s.threshold <= self.scale_
                ]
                new_turn, spans = _apply_sites(turn, fired, dlg.id)
                added += sum(s.words for s in fired)
                log.extend(spans)
                turns.append(new_turn)
            dialogues.append(Dialogue(id=dlg.id, domains=dlg.domains, turns=tuple(turns)))
        self.insertion_log_ = tuple(log)
        self.achieved_ratio_ = added / total if total else 0.0
        return Corpus(X.name, tuple(dialogues), X.ontology)


def insert_disfluencies(
    corpus: Corpus, config: Optional[DisfluencyConfig] = None
) -> tuple[Corpus, tuple[InsertionSpan, ...]]:
    """One-shot form of :class:`DisfluencyInserter`."""
    inserter = DisfluencyInserter(config=config)
    perturbed = inserter.fit_transform(corpus)
    return perturbed, inserter.insertion_log_


def strip_insertions(corpus: Corpus, log: Iterable[InsertionSpan]) -> Corpus:
    """Remove logged insertion spans, restoring the pre-insertion corpus."""
    by_turn: dict[tuple[str, int], list[InsertionSpan]] = {}
    for span in log:
        by_turn.setdefault((span.dialogue_id, span.turn_index), []).append(span)
    dialogues = []
    for dlg in corpus.dialogues:
        turns = []
        for turn in dlg.turns:
            spans = by_turn.get((dlg.id, turn.turn_index), [])
            text = turn.text
            for span in sorted(spans, key=lambda s: s.span_start, reverse=True):
                text = text[: span.span_start] + text[span.span_end :]
            turns.append(replace(turn, text=text) if spans else turn)
        dialogues.append(Dialogue(id=dlg.id, domains=dlg.domains, turns=tuple(turns)))
    return Corpus(corpus.name, tuple(dialogues), corpus.ontology)


def save_insertion_log(log: Iterable[InsertionSpan], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for span in log:
            handle.write(json.dumps(span.to_dict(), sort_keys=True) + "\n")


def load_insertion_log(path: str | Path) -> tuple[InsertionSpan, ...]:
    spans = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{line_no}: not valid JSON: {exc}") from exc
            spans.append(
                InsertionSpan(
                    dialogue_id=raw["dialogue_id"],
                    turn_index=int(raw["turn_index"]),
                    span_start=int(raw["span_start"]),
                    span_end=int(raw["span_end"]),
                    kind=raw["kind"],
                )
            )
    return tuple(spans)

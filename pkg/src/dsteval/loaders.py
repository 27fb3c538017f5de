"""File ingestion: corpora (JSON) and model predictions (line-delimited JSON).

Corpus schema::

    {"name": str, "dialogues": [{"id": str, "domains": [str],
      "turns": [{"speaker": "user"|"system", "text": str,
                 "gold_state": [flat-string, ...]?, "requires_coref": bool?}]}]}

Prediction files hold one JSON object per user turn::

    {"dialogue_id": str, "turn_index": int, "state": [flat-string, ...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .corpus import Corpus, Dialogue, Turn, state_regressions
from .errors import DuplicateKeyError, ParseError, SchemaError
from .ontology import Ontology, default_ontology
from .states import BeliefState


def _require(mapping, key, kind, where):
    if not isinstance(mapping, Mapping) or key not in mapping:
        raise SchemaError(f"{where}: missing key {key!r}")
    value = mapping[key]
    if not isinstance(value, kind):
        raise SchemaError(f"{where}: key {key!r} must be {kind.__name__}")
    return value


def _turn_from_dict(raw, index, dialogue_id, ontology, aliases):
    where = f"dialogue {dialogue_id!r} turn {index}"
    speaker = _require(raw, "speaker", str, where)
    text = _require(raw, "text", str, where)
    if speaker == "user":
        flats = raw.get("gold_state", [])
        if not isinstance(flats, list):
            raise SchemaError(f"{where}: gold_state must be a list of flat strings")
        try:
            gold = BeliefState.from_flat_strings(flats, ontology, aliases)
        except ParseError as exc:
            raise type(exc)(str(exc), dialogue_id=dialogue_id, turn_index=index) from exc
        return Turn(
            speaker=speaker,
            text=text,
            turn_index=index,
            gold_state=gold,
            requires_coref=bool(raw.get("requires_coref", False)),
        )
    if "gold_state" in raw:
        raise SchemaError(f"{where}: system turns carry no gold_state")
    return Turn(speaker=speaker, text=text, turn_index=index)


def corpus_from_dict(
    raw: Mapping,
    ontology: Optional[Ontology] = None,
    aliases: Mapping[str, str] | None = None,
) -> Corpus:
    ontology = ontology or default_ontology()
    name = _require(raw, "name", str, "corpus")
    dialogues_raw = _require(raw, "dialogues", list, "corpus")
    dialogues = []
    for dlg_raw in dialogues_raw:
        dlg_id = _require(dlg_raw, "id", str, "dialogue")
        domains = _require(dlg_raw, "domains", list, f"dialogue {dlg_id!r}")
        turns_raw = _require(dlg_raw, "turns", list, f"dialogue {dlg_id!r}")
        turns = tuple(
            _turn_from_dict(turn_raw, index, dlg_id, ontology, aliases)
            for index, turn_raw in enumerate(turns_raw)
        )
        dialogues.append(Dialogue(id=dlg_id, domains=frozenset(domains), turns=turns))

    corpus = Corpus(name=name, dialogues=tuple(dialogues), ontology=ontology)
    notes = []
    for dialogue in corpus.dialogues:
        notes.extend(state_regressions(dialogue))
    if notes:
        corpus = corpus.with_notes(*notes)
    return corpus


def corpus_to_dict(corpus: Corpus) -> dict:
    dialogues = []
    for dlg in corpus.dialogues:
        turns = []
        for turn in dlg.turns:
            entry: dict = {"speaker": turn.speaker, "text": turn.text}
            if turn.is_user:
                entry["gold_state"] = turn.gold_state.to_flat_strings()
                entry["requires_coref"] = turn.requires_coref
            turns.append(entry)
        dialogues.append({"id": dlg.id, "domains": sorted(dlg.domains), "turns": turns})
    return {"name": corpus.name, "dialogues": dialogues}


def load_corpus(
    path: str | Path,
    ontology: Optional[Ontology] = None,
    aliases: Mapping[str, str] | None = None,
) -> Corpus:
    """Load and validate a corpus file; belief strings are parsed eagerly."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"corpus file {path} is not valid JSON: {exc}") from exc
    return corpus_from_dict(raw, ontology, aliases)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Canonical writer: sorted keys, two-space indent, trailing newline.

    Re-serializing a loaded corpus written by this function is byte-identical.
    """
    text = json.dumps(corpus_to_dict(corpus), indent=2, sort_keys=True, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


@dataclass(frozen=True)
class PredictionSet:
    """Parsed model outputs keyed by (dialogue id, turn index)."""

    model_name: str
    seed_label: str
    records: Mapping[tuple[str, int], BeliefState] = field(default_factory=dict)

    def get(self, dialogue_id: str, turn_index: int) -> Optional[BeliefState]:
        return self.records.get((dialogue_id, turn_index))

    def __len__(self) -> int:
        return len(self.records)


def load_predictions(
    path: str | Path,
    ontology: Optional[Ontology] = None,
    model_name: str = "model",
    seed_label: str = "run0",
    aliases: Mapping[str, str] | None = None,
) -> PredictionSet:
    """Load a line-delimited prediction file.

    Duplicate (dialogue_id, turn_index) keys are rejected; parse failures are
    reported with their line number.
    """
    ontology = ontology or default_ontology()
    records: dict[tuple[str, int], BeliefState] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{line_no}: not valid JSON: {exc}") from exc
            where = f"{path}:{line_no}"
            dialogue_id = _require(raw, "dialogue_id", str, where)
            turn_index = _require(raw, "turn_index", int, where)
            flats = _require(raw, "state", list, where)
            key = (dialogue_id, turn_index)
            if key in records:
                raise DuplicateKeyError(f"{where}: duplicate key {key}")
            try:
                records[key] = BeliefState.from_flat_strings(flats, ontology, aliases)
            except ParseError as exc:
                raise type(exc)(
                    str(exc), dialogue_id=dialogue_id, turn_index=turn_index, line_no=line_no
                ) from exc
    return PredictionSet(model_name=model_name, seed_label=seed_label, records=records)


def save_predictions(predictions: PredictionSet, path: str | Path) -> None:
    """Write records as sorted line-delimited JSON (deterministic)."""
    with open(path, "w", encoding="utf-8") as handle:
        for (dialogue_id, turn_index), state in sorted(predictions.records.items()):
            handle.write(
                json.dumps(
                    {
                        "dialogue_id": dialogue_id,
                        "turn_index": turn_index,
                        "state": state.to_flat_strings(),
                    },
                    sort_keys=True,
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_aliases(path: str | Path) -> dict[str, str]:
    """Load a value alias map used by normalization (off unless provided)."""
    from .states import check_alias_map

    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"alias file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in raw.items()
    ):
        raise SchemaError("alias file must map strings to strings")
    try:
        return dict(check_alias_map(raw))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc

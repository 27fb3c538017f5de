#!/usr/bin/env python3
"""Best-effort converter from the MultiWOZ 2.3 distribution to the corpus
schema used by dsteval.

Usage:
    python tools/convert_multiwoz23.py data.json testListFile.json out.json

Reads the raw MultiWOZ 2.3 ``data.json`` (dialogues keyed by id, turns under
"log", cumulative belief state in the system turn "metadata", coreference
annotations on user turns) and writes the subset listed in the split file as
a dsteval corpus. This script is convenience tooling, not part of the tested
package surface; spot-check its output before relying on it.
"""

import json
import sys
from pathlib import Path

BOOK_SLOTS = ("people", "day", "time", "stay")
NULLISH = {"", "not mentioned", "none", "not_mentioned"}


def flatten_metadata(metadata):
    flats = []
    for domain, groups in sorted(metadata.items()):
        semi = groups.get("semi", {})
        for slot, value in sorted(semi.items()):
            value = value.strip() if isinstance(value, str) else value
            if not value or str(value).lower() in NULLISH:
                continue
            flats.append(f"{domain.lower()} {slot.lower()} {value}")
        book = groups.get("book", {})
        for slot, value in sorted(book.items()):
            if slot == "booked":
                continue
            value = value.strip() if isinstance(value, str) else value
            if not value or str(value).lower() in NULLISH:
                continue
            flats.append(f"{domain.lower()} book {slot.lower()} {value}")
    return flats


def turn_requires_coref(turn):
    coref = turn.get("coreference")
    if isinstance(coref, dict):
        return any(coref.values())
    return bool(coref)


def dialogue_domains(goal):
    skip = {"topic", "message"}
    return sorted(
        domain for domain, content in goal.items() if domain not in skip and content
    )


def convert_dialogue(dialogue_id, raw):
    log = raw.get("log", [])
    turns = []
    for index, entry in enumerate(log):
        text = entry.get("text", "").strip()
        if index % 2 == 0:
            # user turn: cumulative state lives on the following system turn
            if index + 1 < len(log):
                flats = flatten_metadata(log[index + 1].get("metadata", {}))
            else:
                flats = flatten_metadata(entry.get("metadata", {}))
            turns.append(
                {
                    "speaker": "user",
                    "text": text,
                    "gold_state": flats,
                    "requires_coref": turn_requires_coref(entry),
                }
            )
        else:
            turns.append({"speaker": "system", "text": text})
    return {
        "id": dialogue_id,
        "domains": dialogue_domains(raw.get("goal", {})),
        "turns": turns,
    }


def main(argv):
    if len(argv) != 4:
        print(__doc__, file=sys.stderr)
        return 1
    data_path, split_path, out_path = argv[1:]
    data = json.loads(Path(data_path).read_text(encoding="utf-8"))
    split_text = Path(split_path).read_text(encoding="utf-8")
    try:
        wanted = set(json.loads(split_text))
    except json.JSONDecodeError:
        wanted = {line.strip() for line in split_text.splitlines() if line.strip()}

    dialogues = []
    for dialogue_id in sorted(data):
        if dialogue_id in wanted or dialogue_id.replace(".json", "") in wanted:
            dialogues.append(convert_dialogue(dialogue_id, data[dialogue_id]))
    corpus = {"name": Path(out_path).stem, "dialogues": dialogues}
    Path(out_path).write_text(
        json.dumps(corpus, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {len(dialogues)} dialogues to {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))

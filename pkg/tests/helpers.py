"""Deterministic fixture builders shared by the unit and acceptance tests."""

from __future__ import annotations

import random

from dsteval import (
    BeliefState,
    Corpus,
    Dialogue,
    PredictionSet,
    Turn,
    default_ontology,
)

PLACES = (
    "cambridge",
    "london",
    "norwich",
    "ely",
    "peterborough",
    "stevenage",
    "broxbourne",
    "birmingham",
    "leicester",
    "stansted",
)
RESTAURANT_NAMES = (
    "curry garden",
    "golden wok",
    "pizza hut city centre",
    "the gandhi",
    "midsummer house",
    "cotto",
)
HOTEL_NAMES = (
    "acorn guest house",
    "alexander bed and breakfast",
    "hamilton lodge",
    "gonville hotel",
    "cityroomz",
)
ATTRACTION_NAMES = (
    "clare hall",
    "scott polar museum",
    "lynne strover gallery",
    "cineworld",
    "ballare",
)
DAYS = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")
TIMES = ("09:00", "12:15", "17:30", "19:45")
AREAS = ("centre", "north", "south", "east", "west")


def state(flats, ontology=None):
    return BeliefState.from_flat_strings(flats, ontology or default_ontology())


def _train_dialogue(did, rng, ontology, coref):
    dep = rng.choice(PLACES)
    dest = rng.choice([p for p in PLACES if p != dep])
    day = rng.choice(DAYS)
    first = state([f"train departure {dep}", f"train day {day}"], ontology)
    second_flats = [
        f"train departure {dep}",
        f"train day {day}",
        f"train destination {dest}",
    ]
    second_text = f"i want to go to {dest} please"
    if coref:
        second_text = f"i want to go to {dest} on the same day as the restaurant booking"
    return Dialogue(
        id=did,
        domains=frozenset({"train"}),
        turns=(
            Turn("user", f"i need a train leaving from {dep} on {day}", 0, first),
            Turn("system", "where would you like to go?", 1),
            Turn("user", second_text, 2, state(second_flats, ontology), requires_coref=coref),
        ),
    )


def _restaurant_dialogue(did, rng, ontology):
    name = rng.choice(RESTAURANT_NAMES)
    area = rng.choice(AREAS)
    people = str(rng.randint(2, 6))
    time = rng.choice(TIMES)
    first = state([f"restaurant name {name}", f"restaurant area {area}"], ontology)
    second = state(
        [
            f"restaurant name {name}",
            f"restaurant area {area}",
            f"restaurant book people {people}",
            f"restaurant book time {time}",
        ],
        ontology,
    )
    return Dialogue(
        id=did,
        domains=frozenset({"restaurant"}),
        turns=(
            Turn("user", f"i am looking for a restaurant called {name} in the {area}", 0, first),
            Turn("system", "i found it, shall i book a table?", 1),
            Turn("user", f"yes book a table for {people} people at {time}", 2, second),
        ),
    )


def _hotel_dialogue(did, rng, ontology):
    name = rng.choice(HOTEL_NAMES)
    stay = str(rng.randint(1, 5))
    people = str(rng.randint(1, 4))
    first = state([f"hotel name {name}", "hotel parking yes"], ontology)
    second = state(
        [
            f"hotel name {name}",
            "hotel parking yes",
            f"hotel book stay {stay}",
            f"hotel book people {people}",
        ],
        ontology,
    )
    return Dialogue(
        id=did,
        domains=frozenset({"hotel"}),
        turns=(
            Turn("user", f"i need a hotel called {name} with free parking", 0, first),
            Turn("system", "found it, anything else?", 1),
            Turn("user", f"book it for {people} people for {stay} nights", 2, second),
        ),
    )


def _attraction_dialogue(did, rng, ontology):
    name = rng.choice(ATTRACTION_NAMES)
    area = rng.choice(AREAS)
    first = state([f"attraction name {name}"], ontology)
    second = state([f"attraction name {name}", f"attraction area {area}"], ontology)
    return Dialogue(
        id=did,
        domains=frozenset({"attraction"}),
        turns=(
            Turn("user", f"what is the entrance fee for {name}", 0, first),
            Turn("system", "it is free to enter", 1),
            Turn("user", f"great, and is {name} in the {area} of town", 2, second),
        ),
    )


def _taxi_dialogue(did, rng, ontology):
    dep = rng.choice(PLACES)
    dest = rng.choice([p for p in PLACES if p != dep])
    first = state([f"taxi departure {dep}"], ontology)
    second = state([f"taxi departure {dep}", f"taxi destination {dest}"], ontology)
    return Dialogue(
        id=did,
        domains=frozenset({"taxi"}),
        turns=(
            Turn("user", f"i need a taxi from {dep}", 0, first),
            Turn("system", "where to?", 1),
            Turn("user", f"take me to {dest}", 2, second),
        ),
    )


_BUILDERS = {
    "train": _train_dialogue,
    "restaurant": _restaurant_dialogue,
    "hotel": _hotel_dialogue,
    "attraction": _attraction_dialogue,
    "taxi": _taxi_dialogue,
}


def make_fixture_corpus(n_dialogues=50, seed=0, name="fixture", coref_every=10):
    """A deterministic synthetic corpus rotating over five domains.

    Every gold value occurs verbatim in its turn's text, so gold-copying
    predictions never hallucinate; every used slot type has several distinct
    values corpus-wide, so self-repairs always find a distractor.
    """
    ontology = default_ontology()
    rng = random.Random(seed)
    domains = list(_BUILDERS)
    dialogues = []
    for i in range(n_dialogues):
        domain = domains[i % len(domains)]
        did = f"{domain}-{i:04d}"
        if domain == "train":
            coref = coref_every is not None and i % coref_every == 0
            dialogues.append(_train_dialogue(did, rng, ontology, coref))
        else:
            dialogues.append(_BUILDERS[domain](did, rng, ontology))
    return Corpus(name, tuple(dialogues), ontology)


def make_fewshot_corpus(seed=0, per_domain=320, attraction_total=180):
    """Enough single-domain dialogues per domain for the 50/50/200 protocol,
    with attraction capped at 180, plus a few multi-domain distractors."""
    ontology = default_ontology()
    rng = random.Random(seed)
    dialogues = []
    for domain, builder in _BUILDERS.items():
        count = attraction_total if domain == "attraction" else per_domain
        for i in range(count):
            did = f"{domain}-{i:04d}"
            if domain == "train":
                dialogues.append(builder(did, rng, ontology, False))
            else:
                dialogues.append(builder(did, rng, ontology))
    for i in range(7):
        base = _train_dialogue(f"multi-{i:04d}", rng, ontology, False)
        dialogues.append(
            Dialogue(id=base.id, domains=frozenset({"train", "hotel"}), turns=base.turns)
        )
    return Corpus("fewshot-pool", tuple(dialogues), ontology)


def oracle_predictions(corpus, model_name="oracle", seed_label="run0"):
    """Predictions that copy the gold state of every user turn."""
    records = {
        (dlg.id, turn.turn_index): turn.gold_state for dlg, turn in corpus.user_turns()
    }
    return PredictionSet(model_name=model_name, seed_label=seed_label, records=records)


def history_copy_predictions(corpus, model_name="copier", seed_label="run0"):
    """Predictions whose named-entity values are always token runs of the
    history (gold values in this fixture family are stated verbatim)."""
    return oracle_predictions(corpus, model_name=model_name, seed_label=seed_label)


def predictions_lines(predictions):
    import json

    lines = []
    for (dialogue_id, turn_index), st in sorted(predictions.records.items()):
        lines.append(
            json.dumps(
                {
                    "dialogue_id": dialogue_id,
                    "turn_index": turn_index,
                    "state": st.to_flat_strings(),
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + "\n"

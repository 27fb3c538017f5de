import dataclasses
import re

import pytest

from dsteval import (
    Corpus,
    Dialogue,
    NoDistractorError,
    TargetUnreachableError,
    Turn,
    default_ontology,
)
from dsteval.perturb import (
    DisfluencyConfig,
    DisfluencyInserter,
    insert_disfluencies,
    load_insertion_log,
    save_insertion_log,
    strip_insertions,
)

from helpers import make_fixture_corpus, state

ONT = default_ontology()


def user_word_count(corpus):
    return sum(len(t.text.split()) for _, t in corpus.user_turns())


def test_default_config_hits_target_ratio(fixture_corpus):
    inserter = DisfluencyInserter()
    perturbed = inserter.fit_transform(fixture_corpus)
    config = DisfluencyConfig()
    assert abs(inserter.achieved_ratio_ - config.target_ratio) <= config.tolerance
    measured = (user_word_count(perturbed) - user_word_count(fixture_corpus)) / (
        user_word_count(fixture_corpus)
    )
    assert measured == pytest.approx(inserter.achieved_ratio_)


def test_gold_states_unchanged(fixture_corpus):
    perturbed, _ = insert_disfluencies(fixture_corpus)
    for (dlg_p, turn_p), (dlg_o, turn_o) in zip(
        perturbed.user_turns(), fixture_corpus.user_turns()
    ):
        assert dlg_p.id == dlg_o.id
        assert turn_p.gold_state == turn_o.gold_state


def test_system_turns_untouched(fixture_corpus):
    perturbed, _ = insert_disfluencies(fixture_corpus)
    for dlg_p, dlg_o in zip(perturbed.dialogues, fixture_corpus.dialogues):
        for turn_p, turn_o in zip(dlg_p.turns, dlg_o.turns):
            if not turn_p.is_user:
                assert turn_p.text == turn_o.text


def test_strip_logged_insertions_restores_input(fixture_corpus):
    perturbed, log = insert_disfluencies(fixture_corpus)
    assert perturbed != fixture_corpus
    assert strip_insertions(perturbed, log) == fixture_corpus


def test_strip_restores_on_other_seeds():
    for seed in (1, 2, 3):
        corpus = make_fixture_corpus(n_dialogues=20, seed=seed)
        config = DisfluencyConfig(seed=seed)
        perturbed, log = insert_disfluencies(corpus, config)
        assert strip_insertions(perturbed, log) == corpus


def test_self_repair_keeps_gold_value_last():
    corpus = make_fixture_corpus(n_dialogues=30, seed=4)
    # push repairs hard so the property is actually exercised
    config = DisfluencyConfig(
        filler_prob=0.0,
        repetition_prob=0.0,
        restart_prob=0.0,
        repair_prob=1.0,
        target_ratio=0.304,
        tolerance=0.3,
        seed=4,
    )
    inserter = DisfluencyInserter(config)
    perturbed = inserter.fit_transform(corpus)
    repairs = [s for s in inserter.insertion_log_ if s.kind == "self-repair"]
    assert repairs
    turns = {
        (dlg.id, turn.turn_index): turn for dlg, turn in perturbed.user_turns()
    }
    for span in repairs:
        turn = turns[(span.dialogue_id, span.turn_index)]
        text = turn.text.lower()
        tail = text[span.span_end :]
        # the inserted distractor+phrase ends right before the true value
        targets = [
            t.slot_value
            for t in turn.gold_state
            if re.match(rf"{re.escape(t.slot_value)}(?![a-z0-9])", tail)
        ]
        assert targets, f"no gold value follows repair span in {text!r}"
        value = max(targets, key=len)
        occurrences = [
            m.start()
            for m in re.finditer(rf"(?<![a-z0-9]){re.escape(value)}(?![a-z0-9])", text)
        ]
        # final occurrence is the true statement, at or after the span end,
        # and the repaired value never hides inside its own inserted span
        assert occurrences[-1] >= span.span_end
        assert not any(span.span_start <= pos < span.span_end for pos in occurrences)


def test_table_style_repair_shape():
    gold = state(["train departure cambridge"])
    corpus = Corpus(
        "tiny",
        (
            Dialogue(
                "d1",
                frozenset({"train"}),
                (Turn("user", "i would like to leave from cambridge", 0, gold),),
            ),
        ),
        ONT,
    )
    config = DisfluencyConfig(
        filler_prob=0.0,
        repetition_prob=0.0,
        restart_prob=0.0,
        repair_prob=1.0,
        target_ratio=0.304,
        tolerance=1.0,
        seed=0,
        extra_distractors={"train": {"departure": ("london",)}},
    )
    perturbed, log = insert_disfluencies(corpus, config)
    text = perturbed.dialogues[0].turns[0].text
    assert text.endswith("cambridge")
    assert "london" in text
    assert any(phrase in text for phrase in DisfluencyConfig().repair_phrases)
    assert perturbed.dialogues[0].turns[0].gold_state == gold
    assert [s.kind for s in log] == ["self-repair"]


def test_all_zero_probabilities_is_identity(fixture_corpus):
    config = DisfluencyConfig(
        filler_prob=0.0, repetition_prob=0.0, restart_prob=0.0, repair_prob=0.0
    )
    inserter = DisfluencyInserter(config)
    perturbed = inserter.fit_transform(fixture_corpus)
    assert perturbed == fixture_corpus
    assert inserter.achieved_ratio_ == 0.0
    assert inserter.insertion_log_ == ()


def test_unreachable_target_raises(fixture_corpus):
    config = DisfluencyConfig(target_ratio=5.0)
    with pytest.raises(TargetUnreachableError):
        DisfluencyInserter(config).fit(fixture_corpus)


def test_no_distractor_for_lonely_value_raises():
    gold = state(["train departure cambridge"])
    corpus = Corpus(
        "tiny",
        (
            Dialogue(
                "d1",
                frozenset({"train"}),
                (Turn("user", "i leave from cambridge", 0, gold),),
            ),
        ),
        ONT,
    )
    with pytest.raises(NoDistractorError):
        DisfluencyInserter(DisfluencyConfig(tolerance=1.0)).fit(corpus)


def test_same_seed_same_output(fixture_corpus):
    a = DisfluencyInserter(DisfluencyConfig(seed=7)).fit_transform(fixture_corpus)
    b = DisfluencyInserter(DisfluencyConfig(seed=7)).fit_transform(fixture_corpus)
    c = DisfluencyInserter(DisfluencyConfig(seed=8)).fit_transform(fixture_corpus)
    assert a == b
    assert a != c


def test_insertion_log_round_trips_through_file(fixture_corpus, tmp_path):
    _, log = insert_disfluencies(fixture_corpus)
    path = tmp_path / "log.jsonl"
    save_insertion_log(log, path)
    assert load_insertion_log(path) == log


def test_config_file_round_trip(tmp_path):
    config = DisfluencyConfig(filler_prob=0.2, seed=9)
    path = tmp_path / "config.json"
    config.save(path)
    assert DisfluencyConfig.load(path) == config


def test_config_validation():
    with pytest.raises(ValueError):
        DisfluencyConfig(filler_prob=1.5)
    with pytest.raises(ValueError):
        DisfluencyConfig(target_ratio=0.0)
    with pytest.raises(ValueError):
        DisfluencyConfig(filler_lexicon=())


def test_seed_override_via_replace(fixture_corpus):
    base = DisfluencyConfig()
    overridden = dataclasses.replace(base, seed=42)
    a = DisfluencyInserter(overridden).fit_transform(fixture_corpus)
    b = DisfluencyInserter(DisfluencyConfig(seed=42)).fit_transform(fixture_corpus)
    assert a == b

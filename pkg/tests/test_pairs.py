import pytest

from dsteval import (
    AlignmentError,
    Corpus,
    EntityScrambler,
    GoldMismatchError,
    align_pairs,
)
from dsteval.pairs import DISFLUENCY, NAMED_ENTITY, PARAPHRASE


def test_identity_alignment_yields_equal_golds(fixture_corpus):
    alignment = align_pairs(fixture_corpus, fixture_corpus, PARAPHRASE)
    assert len(alignment.pairs) == fixture_corpus.n_user_turns()
    assert not alignment.unmatched_original
    assert not alignment.unmatched_perturbed
    for pair in alignment.pairs:
        assert pair.original.gold == pair.perturbed.gold
        assert pair.original.history == pair.perturbed.history


def test_missing_dialogue_raises_alignment_error(fixture_corpus):
    truncated = Corpus(
        fixture_corpus.name,
        fixture_corpus.dialogues[1:],
        fixture_corpus.ontology,
    )
    with pytest.raises(AlignmentError) as excinfo:
        align_pairs(fixture_corpus, truncated, PARAPHRASE)
    missing_ids = {dialogue_id for dialogue_id, _ in excinfo.value.missing}
    assert fixture_corpus.dialogues[0].id in missing_ids


def test_non_strict_alignment_accounts_for_every_turn(fixture_corpus):
    truncated = Corpus(
        fixture_corpus.name,
        fixture_corpus.dialogues[2:],
        fixture_corpus.ontology,
    )
    alignment = align_pairs(fixture_corpus, truncated, PARAPHRASE, strict=False)
    n_orig = fixture_corpus.n_user_turns()
    n_pert = truncated.n_user_turns()
    assert len(alignment.pairs) + len(alignment.unmatched_original) == n_orig
    assert len(alignment.pairs) + len(alignment.unmatched_perturbed) == n_pert


def test_gold_mismatch_for_gold_preserving_kinds(fixture_corpus):
    scrambled = EntityScrambler(seed=1).fit(fixture_corpus).transform(fixture_corpus)
    with pytest.raises(GoldMismatchError):
        align_pairs(fixture_corpus, scrambled, DISFLUENCY)
    # the same misaligned corpora pass when the gold check is deferred
    alignment = align_pairs(fixture_corpus, scrambled, DISFLUENCY, check_gold=False)
    assert alignment.pairs


def test_scrambled_corpus_passes_mapped_equality(fixture_corpus):
    scrambler = EntityScrambler(seed=1).fit(fixture_corpus)
    scrambled = scrambler.transform(fixture_corpus)
    alignment = align_pairs(
        fixture_corpus, scrambled, NAMED_ENTITY, entity_map=scrambler.entity_map_
    )
    assert len(alignment.pairs) == fixture_corpus.n_user_turns()
    assert not alignment.unmatched_original


def test_mapped_equality_catches_tampered_gold(fixture_corpus):
    from dsteval import BeliefState, Dialogue, SlotTriple, Turn

    scrambler = EntityScrambler(seed=1).fit(fixture_corpus)
    scrambled = scrambler.transform(fixture_corpus)
    # overwrite one scrambled gold value so it no longer mirrors the map
    dialogues = list(scrambled.dialogues)
    victim = dialogues[0]
    turns = list(victim.turns)
    turn = turns[0]
    tampered_state = BeliefState.from_triples(
        [
            SlotTriple(t.domain, t.slot_type, "tampered value")
            if fixture_corpus.ontology.is_named_entity(t.domain, t.slot_type)
            else t
            for t in turn.gold_state
        ]
    )
    turns[0] = Turn(turn.speaker, turn.text, turn.turn_index, tampered_state)
    dialogues[0] = Dialogue(victim.id, victim.domains, tuple(turns))
    tampered = Corpus(scrambled.name, tuple(dialogues), scrambled.ontology)
    with pytest.raises(GoldMismatchError):
        align_pairs(
            fixture_corpus, tampered, NAMED_ENTITY, entity_map=scrambler.entity_map_
        )


def test_unknown_kind_rejected(fixture_corpus):
    with pytest.raises(ValueError):
        align_pairs(fixture_corpus, fixture_corpus, "typo")


def test_pair_sample_exposes_turn_and_history_text(fixture_corpus):
    alignment = align_pairs(fixture_corpus, fixture_corpus, PARAPHRASE)
    pair = alignment.pairs[0]
    assert pair.original.turn_text == pair.original.history[-1]
    assert pair.original.turn_text in pair.original.history_text

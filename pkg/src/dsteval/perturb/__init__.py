"""Perturbation generators and corpus splitters."""

from .disfluency import (
    DisfluencyConfig,
    DisfluencyInserter,
    InsertionSpan,
    insert_disfluencies,
    load_insertion_log,
    save_insertion_log,
    strip_insertions,
)
from .fewshot import FEWSHOT_DOMAINS, FewShotSampler, sample_fewshot
from .paraphrase import ParaphraseReport, validate_paraphrase_pairs, word_replacement_rate
from .scramble import (
    EntityMap,
    EntityScrambler,
    apply_entity_map,
    apply_entity_map_to_state,
    apply_entity_map_to_text,
    build_entity_map,
    find_orphan_entities,
    scramble_entities,
    scramble_string,
)

__all__ = [
    "DisfluencyConfig",
    "DisfluencyInserter",
    "InsertionSpan",
    "insert_disfluencies",
    "load_insertion_log",
    "save_insertion_log",
    "strip_insertions",
    "FEWSHOT_DOMAINS",
    "FewShotSampler",
    "sample_fewshot",
    "ParaphraseReport",
    "validate_paraphrase_pairs",
    "word_replacement_rate",
    "EntityMap",
    "EntityScrambler",
    "apply_entity_map",
    "apply_entity_map_to_state",
    "apply_entity_map_to_text",
    "build_entity_map",
    "find_orphan_entities",
    "scramble_entities",
    "scramble_string",
]

"""dsteval: robustness evaluation harness for dialogue state tracking.

Loads task-oriented dialogue corpora and model predictions, generates
perturbed test sets (scrambled named entities, speech disfluencies),
validates ingested paraphrases, and scores joint goal accuracy along with
its robustness companions: conditional JGA over original/perturbed pairs,
coreference-restricted JGA, and no-hallucination frequency.
"""

from .coref import DEFAULT_COREF_PATTERNS, tag_coreferences
from .corpus import Corpus, Dialogue, Turn
from .errors import (
    AlignmentError,
    BadPatternError,
    CollisionError,
    DstEvalError,
    DuplicateKeyError,
    EmptyDenominatorError,
    EmptyValueError,
    GoldMismatchError,
    InsufficientDialoguesError,
    NoDistractorError,
    ParseError,
    PredictionTargetError,
    SchemaError,
    SchemaMismatchError,
    TargetUnreachableError,
    UndefinedMetricError,
    UnknownDomainError,
    UnknownSlotTypeError,
)
from .evaluate import evaluate_run
from .loaders import (
    PredictionSet,
    load_aliases,
    load_corpus,
    load_predictions,
    save_corpus,
    save_predictions,
)
from .metrics import (
    aggregate_runs,
    conditional_jga,
    contains_token_span,
    coref_joint_goal_accuracy,
    joint_goal_accuracy,
    no_hallucination_frequency,
    states_match,
    turn_verdicts,
)
from .ontology import Ontology, SlotSpec, default_ontology
from .pairs import (
    DISFLUENCY,
    NAMED_ENTITY,
    PARAPHRASE,
    PERTURBATION_KINDS,
    EvalSample,
    PairAlignment,
    PairedSample,
    align_pairs,
)
from .perturb import (
    DisfluencyConfig,
    DisfluencyInserter,
    EntityMap,
    EntityScrambler,
    FewShotSampler,
    InsertionSpan,
    insert_disfluencies,
    sample_fewshot,
    scramble_entities,
    strip_insertions,
    validate_paraphrase_pairs,
)
from .report import (
    CombinedReport,
    MetricValue,
    RunReport,
    config_hash,
    merge_reports,
    render_table,
)
from .states import BeliefState, SlotTriple, normalize_value, parse_belief_string, render_belief_state

__version__ = "0.1.0"

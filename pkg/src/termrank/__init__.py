"""Rank terms-and-conditions statements by crowd-perceived importance.

The pipeline: segment a policy into statements (corpus), enumerate
order-balanced pairwise voting tasks and aggregate the votes (pairing),
fit a paired-comparison strength model and rank (btrank), measure how
stable the ranking is under subsampling (sampling), relate it to
readability and word choice (textstats), train a classifier that
predicts importance for unseen policies (classifier), and serve the
whole loop over HTTP (service).
"""

from .btrank import (
    BTModel,
    Ranking,
    correlation_checks,
    fit_bradley_terry,
    rank_from_model,
    win_probability,
)
from .corpus import (
    PolicyDocument,
    Statement,
    segment_policy,
    statement_length_summary,
)
from .errors import (
    ConflictingResubmission,
    CoverageInfeasible,
    DegenerateTrainingSet,
    EmptyInput,
    IncompleteComparison,
    InsufficientData,
    InsufficientWorkers,
    InvalidChoice,
    InvalidDocument,
    InvalidInput,
    InvalidLabels,
    InvalidThreshold,
    NoData,
    NotEnoughStatements,
    NoTaskAvailable,
    StaleAssignment,
    TermRankError,
    UnknownPolicy,
    UnknownStatement,
    UnknownWorker,
)
from .pairing import (
    CHOICES,
    VOTES_PER_PAIR,
    AggregatedComparison,
    Hit,
    PairKey,
    Vote,
    WinTuple,
    aggregate_pair,
    agreement_summary,
    canonicalize_vote,
    enumerate_pairs,
    extract_win_tuples,
    generate_hits,
    sample_with_coverage,
)
from .sampling import (
    DEFAULT_FRACTIONS,
    SamplingReport,
    association_strength,
    kendall_tau,
    run_scalability_experiment,
    sample_comparisons,
    similarity_coefficient,
)
from .service import TaskService, create_app
from .synthetic import (
    keyword_pool_corpus,
    planted_policy,
    sample_comparisons_from_abilities,
)
from .textstats import (
    ReadabilityScore,
    WordChiSquare,
    chi_square_2x2,
    chi_square_words,
    count_syllables,
    flesch_bucket,
    flesch_score,
    readability_vs_rank,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # corpus
    "PolicyDocument",
    "Statement",
    "segment_policy",
    "statement_length_summary",
    # pairing
    "CHOICES",
    "VOTES_PER_PAIR",
    "AggregatedComparison",
    "Hit",
    "PairKey",
    "Vote",
    "WinTuple",
    "aggregate_pair",
    "agreement_summary",
    "canonicalize_vote",
    "enumerate_pairs",
    "extract_win_tuples",
    "generate_hits",
    "sample_with_coverage",
    # btrank
    "BTModel",
    "Ranking",
    "correlation_checks",
    "fit_bradley_terry",
    "rank_from_model",
    "win_probability",
    # sampling
    "DEFAULT_FRACTIONS",
    "SamplingReport",
    "association_strength",
    "kendall_tau",
    "run_scalability_experiment",
    "sample_comparisons",
    "similarity_coefficient",
    # textstats
    "ReadabilityScore",
    "WordChiSquare",
    "chi_square_2x2",
    "chi_square_words",
    "count_syllables",
    "flesch_bucket",
    "flesch_score",
    "readability_vs_rank",
    # service
    "TaskService",
    "create_app",
    # synthetic
    "keyword_pool_corpus",
    "planted_policy",
    "sample_comparisons_from_abilities",
    # errors
    "TermRankError",
    "ConflictingResubmission",
    "CoverageInfeasible",
    "DegenerateTrainingSet",
    "EmptyInput",
    "IncompleteComparison",
    "InsufficientData",
    "InsufficientWorkers",
    "InvalidChoice",
    "InvalidDocument",
    "InvalidInput",
    "InvalidLabels",
    "InvalidThreshold",
    "NoData",
    "NotEnoughStatements",
    "NoTaskAvailable",
    "StaleAssignment",
    "UnknownPolicy",
    "UnknownStatement",
    "UnknownWorker",
]

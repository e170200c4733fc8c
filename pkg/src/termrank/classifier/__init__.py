"""Importance classifier: text pipeline, features, SVM, and experiments."""

from .experiment import (
    DEFAULT_GRID,
    DEFAULT_T_VALUES,
    EvalMetrics,
    GridPoint,
    GridSearchResult,
    LabeledStatement,
    StatementRecord,
    bin_labels,
    evaluate,
    grid_search,
    run_experiment,
    train_svm,
)
from .features import (
    DEFAULT_DIMENSION,
    EmbeddingTable,
    FeatureVector,
    TfIdf,
    build_tfidf,
    fallback_embeddings,
    featurize,
    load_embeddings,
    save_embeddings,
)
from .model_io import PredictorBundle, load_predictor, save_predictor
from .preprocess import PIPELINE_VERSION, preprocess
from .stemmer import stem
from .svm import KKT_TOLERANCE, SMOResult, SVMModel, fit_svm, kernel_matrix, smo_solve

__all__ = [
    "DEFAULT_DIMENSION",
    "DEFAULT_GRID",
    "DEFAULT_T_VALUES",
    "EmbeddingTable",
    "EvalMetrics",
    "FeatureVector",
    "GridPoint",
    "GridSearchResult",
    "KKT_TOLERANCE",
    "LabeledStatement",
    "PIPELINE_VERSION",
    "PredictorBundle",
    "SMOResult",
    "SVMModel",
    "StatementRecord",
    "TfIdf",
    "bin_labels",
    "build_tfidf",
    "evaluate",
    "fallback_embeddings",
    "featurize",
    "fit_svm",
    "grid_search",
    "kernel_matrix",
    "load_embeddings",
    "load_predictor",
    "preprocess",
    "run_experiment",
    "save_embeddings",
    "save_predictor",
    "smo_solve",
    "stem",
    "train_svm",
]

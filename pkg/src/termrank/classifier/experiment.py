"""Importance-classification experiment: binning, grid search, bootstraps.

A policy's ranked statements are binned into important (top T%) and
unimportant (bottom half); the band in between never enters training or
evaluation. Hyper-parameters come from stratified 5-fold grid search on
each bootstrap's training split, scored by balanced accuracy.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .._stats import round_half_up
from ..btrank import Ranking
from ..errors import (
    InsufficientData,
    InvalidInput,
    InvalidThreshold,
    UnknownPolicy,
)
from .features import EmbeddingTable, build_tfidf, featurize
from .svm import SVMModel, fit_svm

__all__ = [
    "StatementRecord",
    "LabeledStatement",
    "EvalMetrics",
    "GridPoint",
    "GridSearchResult",
    "DEFAULT_GRID",
    "DEFAULT_T_VALUES",
    "bin_labels",
    "train_svm",
    "grid_search",
    "evaluate",
    "run_experiment",
]

LABEL_IMPORTANT = "important"
LABEL_UNIMPORTANT = "unimportant"

BAND_TOP = "top_T"
BAND_MIDDLE = "middle_excluded"
BAND_BOTTOM = "bottom_half"

DEFAULT_T_VALUES = (5, 10, 15, 20, 25)

_C_VALUES = (0.1, 1.0, 10.0, 100.0, 1000.0)
_GAMMA_VALUES = (1e-4, 1e-3, 1e-2, 1e-1)


@dataclass(frozen=True)
class GridPoint:
    kernel: str
    C: float
    gamma: float | None = None


DEFAULT_GRID = tuple(
    [GridPoint("linear", c) for c in _C_VALUES]
    + [GridPoint("rbf", c, g) for c in _C_VALUES for g in _GAMMA_VALUES]
)


@dataclass(frozen=True)
class StatementRecord:
    statement_id: str
    policy_id: str
    text: str
    tokens: tuple[str, ...]


@dataclass
class LabeledStatement:
    statement_id: str
    feature: np.ndarray
    label: str  # important | unimportant
    band: str  # top_T | middle_excluded | bottom_half


@dataclass
class EvalMetrics:
    balanced_accuracy: float
    recall: float
    precision: float
    tp: int
    fp: int
    tn: int
    fn: int
    error_listing: dict[str, list[str]] = field(default_factory=dict)


@dataclass
class GridSearchResult:
    best: GridPoint
    cv_balanced_accuracy: float
    table: list[dict]


def bin_labels(ranking: Ranking, T: float) -> dict[str, str]:
    """Band per statement: top max(1, floor(T*N/100)) ranks are top_T,
    the bottom floor(N/2) ranks are bottom_half, the rest excluded."""
    if not 0 < T <= 50:
        raise InvalidThreshold(f"T must be in (0, 50], got {T}")
    ordered = ranking.ordered
    n = len(ordered)
    k_top = max(1, math.floor(T * n / 100))
    n_bottom = n // 2
    bands = {}
    for pos, statement_id in enumerate(ordered):
        if pos < k_top:
            bands[statement_id] = BAND_TOP
        elif pos >= n - n_bottom:
            bands[statement_id] = BAND_BOTTOM
        else:
            bands[statement_id] = BAND_MIDDLE
    return bands


def _as_arrays(rows: Sequence[LabeledStatement]) -> tuple[np.ndarray, np.ndarray]:
    X = np.array([r.feature for r in rows], dtype=float)
    y = np.array(
        [1.0 if r.label == LABEL_IMPORTANT else -1.0 for r in rows], dtype=float
    )
    return X, y


def train_svm(
    rows: Sequence[LabeledStatement],
    kernel: str = "rbf",
    C: float = 1.0,
    gamma: float | None = None,
    seed: int | None = None,
) -> SVMModel:
    """Fit an SVM on labeled statement rows (important = +1)."""
    if not rows:
        raise InvalidInput("no rows to train on")
    X, y = _as_arrays(rows)
    return fit_svm(X, y, kernel=kernel, C=C, gamma=gamma, seed=seed)


def _stratified_folds(
    y: np.ndarray, folds: int, rng: random.Random
) -> list[np.ndarray]:
    """Deal each class round-robin into `folds` buckets after a shuffle."""
    buckets: list[list[int]] = [[] for _ in range(folds)]
    for cls in (1.0, -1.0):
        idx = [int(i) for i in np.flatnonzero(y == cls)]
        if len(idx) < folds:
            raise InsufficientData(
                f"class {cls:+.0f} has {len(idx)} rows; need >= {folds} for {folds}-fold CV"
            )
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            buckets[pos % folds].append(i)
    return [np.array(sorted(b)) for b in buckets]


def _balanced_accuracy(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    tp = int(np.sum((y_true > 0) & (y_pred > 0)))
    fn = int(np.sum((y_true > 0) & (y_pred < 0)))
    tn = int(np.sum((y_true < 0) & (y_pred < 0)))
    fp = int(np.sum((y_true < 0) & (y_pred > 0)))
    tpr = tp / (tp + fn) if tp + fn else 0.0
    tnr = tn / (tn + fp) if tn + fp else 0.0
    return (tpr + tnr) / 2.0


def grid_search(
    rows: Sequence[LabeledStatement],
    grid: Sequence[GridPoint] = DEFAULT_GRID,
    folds: int = 5,
    seed: int | None = None,
) -> GridSearchResult:
    """Stratified k-fold CV over the grid, maximizing mean balanced
    accuracy. Ties prefer smaller C, then smaller gamma, then linear."""
    if not grid:
        raise InvalidInput("empty grid")
    X, y = _as_arrays(rows)
    rng = random.Random(seed)
    fold_idx = _stratified_folds(y, folds, rng)

    table = []
    for point in grid:
        scores = []
        for f in range(folds):
            val = fold_idx[f]
            train = np.concatenate([fold_idx[g] for g in range(folds) if g != f])
            model = fit_svm(
                X[train], y[train], kernel=point.kernel, C=point.C, gamma=point.gamma
            )
            scores.append(_balanced_accuracy(y[val], model.predict(X[val])))
        table.append({
            "kernel": point.kernel,
            "C": point.C,
            "gamma": point.gamma,
            "cv_balanced_accuracy": sum(scores) / folds,
        })

    def sort_key(entry: dict):
        return (
            -entry["cv_balanced_accuracy"],
            entry["C"],
            entry["gamma"] if entry["gamma"] is not None else 0.0,
            0 if entry["kernel"] == "linear" else 1,
        )

    best_entry = min(table, key=sort_key)
    best = GridPoint(best_entry["kernel"], best_entry["C"], best_entry["gamma"])
    return GridSearchResult(
        best=best,
        cv_balanced_accuracy=best_entry["cv_balanced_accuracy"],
        table=table,
    )


def evaluate(
    model: SVMModel,
    rows: Sequence[LabeledStatement],
    texts: Mapping[str, str] | None = None,
) -> EvalMetrics:
    """Confusion metrics plus the misclassified statements by text."""
    if not rows:
        raise InvalidInput("empty validation set")
    X, y = _as_arrays(rows)
    pred = model.predict(X)
    tp = int(np.sum((y > 0) & (pred > 0)))
    fn = int(np.sum((y > 0) & (pred < 0)))
    tn = int(np.sum((y < 0) & (pred < 0)))
    fp = int(np.sum((y < 0) & (pred > 0)))
    tpr = tp / (tp + fn) if tp + fn else 0.0
    tnr = tn / (tn + fp) if tn + fp else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0

    def text_of(row: LabeledStatement) -> str:
        if texts is not None and row.statement_id in texts:
            return texts[row.statement_id]
        return row.statement_id

    false_positives = [
        text_of(r) for r, t, p in zip(rows, y, pred) if t < 0 and p > 0
    ]
    false_negatives = [
        text_of(r) for r, t, p in zip(rows, y, pred) if t > 0 and p < 0
    ]
    return EvalMetrics(
        balanced_accuracy=(tpr + tnr) / 2.0,
        recall=tpr,
        precision=precision,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        error_listing={
            "false_positives": false_positives,
            "false_negatives": false_negatives,
        },
    )


def _stratified_split(
    rows: Sequence[LabeledStatement], rng: random.Random
) -> tuple[list[LabeledStatement], list[LabeledStatement]]:
    """8:2 train/validation split, stratified by label; every class keeps
    at least one validation row."""
    train: list[LabeledStatement] = []
    val: list[LabeledStatement] = []
    for label in (LABEL_IMPORTANT, LABEL_UNIMPORTANT):
        group = [r for r in rows if r.label == label]
        rng.shuffle(group)
        n_val = max(1, round_half_up(0.2 * len(group))) if group else 0
        val.extend(group[:n_val])
        train.extend(group[n_val:])
    return train, val


def run_experiment(
    records: Sequence[StatementRecord],
    rankings: Mapping[str, Ranking],
    embeddings: EmbeddingTable,
    T_values: Sequence[float] = DEFAULT_T_VALUES,
    bootstraps: int = 10,
    seed: int | None = None,
    grid: Sequence[GridPoint] = DEFAULT_GRID,
    folds: int = 5,
) -> dict[float, dict]:
    """Full pipeline per threshold T: bin, bootstrap 8:2 splits, grid
    search on the training side, refit, evaluate. Reports per-T means.

    Bootstrap cells derive their seeds as seed + 7919*T_index + 101*b,
    so runs are reproducible and cells are independent.
    """
    policies = {r.policy_id for r in records}
    if len(policies) < 2:
        raise InvalidInput(f"dataset spans {len(policies)} policy(ies); need >= 2")
    for policy_id in sorted(policies):
        if policy_id not in rankings:
            raise UnknownPolicy(f"no ranking for policy {policy_id!r}")

    tfidf = build_tfidf([r.tokens for r in records])
    features = {
        r.statement_id: featurize(r.tokens, tfidf, embeddings).values for r in records
    }
    texts = {r.statement_id: r.text for r in records}
    by_id = {r.statement_id: r for r in records}

    results: dict[float, dict] = {}
    for t_idx, T in enumerate(T_values):
        rows: list[LabeledStatement] = []
        for policy_id in sorted(policies):
            bands = bin_labels(rankings[policy_id], T)
            for statement_id in sorted(bands):
                if statement_id not in by_id:
                    continue  # ranked but not part of the dataset
                band = bands[statement_id]
                if band == BAND_MIDDLE:
                    continue
                label = LABEL_IMPORTANT if band == BAND_TOP else LABEL_UNIMPORTANT
                rows.append(LabeledStatement(
                    statement_id=statement_id,
                    feature=features[statement_id],
                    label=label,
                    band=band,
                ))

        per_bootstrap: list[EvalMetrics] = []
        chosen: list[GridPoint] = []
        for b in range(bootstraps):
            cell_seed = None if seed is None else seed + 7919 * t_idx + 101 * b
            rng = random.Random(cell_seed)
            train_rows, val_rows = _stratified_split(rows, rng)
            search = grid_search(train_rows, grid=grid, folds=folds, seed=cell_seed)
            model = train_svm(
                train_rows,
                kernel=search.best.kernel,
                C=search.best.C,
                gamma=search.best.gamma,
                seed=cell_seed,
            )
            per_bootstrap.append(evaluate(model, val_rows, texts))
            chosen.append(search.best)

        counts = Counter(chosen)
        modal = sorted(
            counts,
            key=lambda p: (
                -counts[p], p.C, p.gamma if p.gamma is not None else 0.0, p.kernel
            ),
        )[0]
        results[T] = {
            "balanced_accuracy": sum(m.balanced_accuracy for m in per_bootstrap) / bootstraps,
            "recall": sum(m.recall for m in per_bootstrap) / bootstraps,
            "precision": sum(m.precision for m in per_bootstrap) / bootstraps,
            "per_bootstrap": per_bootstrap,
            "chosen": chosen,
            "modal_choice": modal,
        }
    return results

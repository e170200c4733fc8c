"""Bradley-Terry fitting and ranking.

Statement i beats j with probability a_i / (a_i + a_j). Abilities are
fitted by minorization-maximization on win counts, with an optional
pseudo-count alpha spread across opponents so the estimate stays finite
when the comparison graph is not strongly connected (an undefeated
statement otherwise diverges). Log-abilities theta are reported in the
zero-sum gauge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._stats import pearson
from .errors import EmptyInput, InsufficientData, InvalidInput, NoData, UnknownStatement
from .pairing import AggregatedComparison, WinTuple

__all__ = [
    "BTModel",
    "Ranking",
    "fit_bradley_terry",
    "rank_from_model",
    "win_probability",
    "correlation_checks",
]

# Abilities never reach exactly zero under alpha > 0. Under alpha = 0 a
# winless item's MLE sits on the simplex boundary; flooring keeps the
# log finite without affecting anyone's ordering.
_ABILITY_FLOOR = 1e-300


@dataclass
class BTModel:
    policy_id: str
    abilities: dict[str, float]  # statement_id -> log-ability theta
    iterations: int
    converged: bool
    regularization: float
    uncompared: frozenset[str] = frozenset()
    loglik_trace: list[float] = field(default_factory=list)


@dataclass
class Ranking:
    policy_id: str
    ordered: list[str]  # rank 1 first
    rank_of: dict[str, int]
    relative_rank: dict[str, float]


def _loglik(a: np.ndarray, w: np.ndarray, m: np.ndarray, iu) -> float:
    s = a[:, None] + a[None, :]
    return float(w @ np.log(a) - (m[iu] * np.log(s[iu])).sum())


def fit_bradley_terry(
    tuples: list[WinTuple],
    alpha: float = 0.01,
    tolerance: float = 1e-8,
    max_iterations: int = 10_000,
    statements: list[str] | None = None,
    policy_id: str = "",
    track_loglik: bool = False,
    initial: dict[str, float] | None = None,
) -> BTModel:
    """Fit abilities to (winner, loser) observations.

    The MM step is a_i <- (W_i + alpha) / sum_{j != i} (n_ij + r)/(a_i + a_j)
    with r = 2*alpha/(N-1), renormalized to geometric mean 1 each step.
    Convergence is max |theta update| < tolerance; running out of
    iterations returns converged=False rather than raising.

    Statements listed in `statements` but absent from every tuple get
    theta = 0 and are reported in `uncompared`.

    `initial` warm-starts the iteration from the given log-abilities
    (missing statements start at 0). With alpha > 0 the objective has a
    unique optimum, so the start point changes only the iteration count.
    """
    if not tuples:
        raise NoData("no win tuples to fit")
    if alpha < 0:
        raise InvalidInput(f"alpha must be >= 0, got {alpha}")
    if tolerance <= 0:
        raise InvalidInput(f"tolerance must be > 0, got {tolerance}")

    for t in tuples:
        if t.winner == t.loser:
            raise InvalidInput(f"tuple pits {t.winner!r} against itself")
    compared = sorted({t.winner for t in tuples} | {t.loser for t in tuples})
    if statements is not None:
        known = set(statements)
        missing = [s for s in compared if s not in known]
        if missing:
            raise UnknownStatement(f"tuples reference unknown statements: {missing[:5]}")
        uncompared = frozenset(known - set(compared))
    else:
        uncompared = frozenset()

    n = len(compared)
    idx = {s: i for i, s in enumerate(compared)}
    wins_dir = np.zeros((n, n))
    for t in tuples:
        wins_dir[idx[t.winner], idx[t.loser]] += 1.0
    w = wins_dir.sum(axis=1) + alpha
    reg = 2.0 * alpha / (n - 1) if n > 1 else 0.0
    m = wins_dir + wins_dir.T + reg
    np.fill_diagonal(m, 0.0)
    iu = np.triu_indices(n, 1)

    if initial:
        theta = np.array([initial.get(s, 0.0) for s in compared])
        theta -= theta.mean()
        a = np.exp(theta)
    else:
        a = np.ones(n)
        theta = np.zeros(n)
    trace: list[float] = []
    converged = False
    iterations = 0
    # preallocated scratch; the loop is raw ufunc calls because wrapper
    # overhead dominates at these matrix sizes
    s = np.empty((n, n))
    ratio = np.empty((n, n))
    denom = np.empty(n)
    log_a = np.empty(n)
    scratch = np.empty(n)
    for iterations in range(1, max_iterations + 1):
        np.add.outer(a, a, out=s)
        np.divide(m, s, out=ratio)
        np.add.reduce(ratio, axis=1, out=denom)
        np.divide(w, denom, out=a)
        np.maximum(a, _ABILITY_FLOOR, out=a)
        np.log(a, out=log_a)
        log_a -= np.add.reduce(log_a) / n
        np.exp(log_a, out=a)
        if track_loglik:
            trace.append(_loglik(a, w, m, iu))
        np.subtract(log_a, theta, out=scratch)
        np.abs(scratch, out=scratch)
        delta = float(np.maximum.reduce(scratch))
        theta, log_a = log_a, theta
        if delta < tolerance:
            converged = True
            break

    abilities = {s: float(theta[i]) for s, i in idx.items()}
    for s in uncompared:
        abilities[s] = 0.0
    return BTModel(
        policy_id=policy_id,
        abilities=abilities,
        iterations=iterations,
        converged=converged,
        regularization=alpha,
        uncompared=uncompared,
        loglik_trace=trace,
    )


def rank_from_model(model: BTModel) -> Ranking:
    """Total order by descending theta; ties break by ascending statement_id."""
    if not model.abilities:
        raise EmptyInput("model covers no statements")
    ordered = sorted(model.abilities, key=lambda s: (-model.abilities[s], s))
    n = len(ordered)
    rank_of = {s: r for r, s in enumerate(ordered, start=1)}
    relative = {s: r / n for s, r in rank_of.items()}
    return Ranking(
        policy_id=model.policy_id,
        ordered=ordered,
        rank_of=rank_of,
        relative_rank=relative,
    )


def win_probability(model: BTModel, i: str, j: str) -> float:
    """P(i beats j) = a_i / (a_i + a_j) with a = exp(theta)."""
    if i == j:
        raise InvalidInput("win probability needs two distinct statements")
    for s in (i, j):
        if s not in model.abilities:
            raise UnknownStatement(f"statement {s!r} not in model")
    # a_i/(a_i+a_j) computed in log space for overflow safety
    return 1.0 / (1.0 + math.exp(model.abilities[j] - model.abilities[i]))


def correlation_checks(
    comparisons: list[AggregatedComparison],
    ranking: Ranking,
) -> dict[str, dict[str, float]]:
    """Sanity correlations between raw votes and the fitted ranking.

    Signed rank difference for pair (a, b) is rank(b) - rank(a), so a
    positive value means a ranks better, matching a positive sum score.
    Agreement is checked against the absolute rank difference: clear-cut
    pairs should sit farther apart.
    """
    if len(comparisons) < 3:
        raise InsufficientData(f"need >= 3 comparisons, got {len(comparisons)}")
    sums, diffs, agreements = [], [], []
    for c in comparisons:
        for s in (c.pair.a, c.pair.b):
            if s not in ranking.rank_of:
                raise UnknownStatement(f"statement {s!r} missing from ranking")
        diff = ranking.rank_of[c.pair.b] - ranking.rank_of[c.pair.a]
        sums.append(float(c.sum_score))
        diffs.append(float(diff))
        agreements.append(c.percent_agreement)
    r1, p1 = pearson(sums, diffs)
    r2, p2 = pearson(agreements, [abs(d) for d in diffs])
    return {
        "pearson_score_vs_rankdiff": {"r": r1, "p_value": p1},
        "pearson_agreement_vs_absrankdiff": {"r": r2, "p_value": p2},
    }

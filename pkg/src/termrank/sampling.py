"""Subsampling scalability experiment.

How much of the full comparison budget is needed before the ranking
stabilizes? Comparisons are subsampled at fractions 0.1..1.0, the model
is refitted, and the refitted ranking is scored against the full-data
ranking by Kendall tau and by overlap of the top-20% statement sets.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from ._stats import round_half_up
from .btrank import Ranking, fit_bradley_terry, rank_from_model
from .errors import InvalidInput, NoData
from .pairing import AggregatedComparison, extract_win_tuples, sample_with_coverage

__all__ = [
    "SamplingReport",
    "kendall_tau",
    "sample_comparisons",
    "similarity_coefficient",
    "run_scalability_experiment",
    "DEFAULT_FRACTIONS",
    "association_strength",
]

DEFAULT_FRACTIONS = tuple(round(f * 0.1, 1) for f in range(1, 11))


@dataclass(frozen=True)
class SamplingReport:
    policy_id: str
    simulation: int
    fraction: float
    tau: float
    tau_p_value: float
    similarity: float
    seed: int | None


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> dict[str, float]:
    """Kendall tau-b with tie correction and a normal-approximation p-value.

    Equals tau-a on tie-free input. Degenerate input (either side
    constant) returns tau 0 by the tie-correction convention.
    """
    if len(x) != len(y):
        raise InvalidInput(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise InvalidInput(f"need >= 2 observations, got {n}")

    concordant = discordant = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            prod = (x[i] - x[j]) * (y[i] - y[j])
            if prod > 0:
                concordant += 1
            elif prod < 0:
                discordant += 1

    def tie_groups(v: Sequence[float]) -> list[int]:
        counts: dict[float, int] = {}
        for value in v:
            counts[value] = counts.get(value, 0) + 1
        return [c for c in counts.values() if c > 1]

    tx, ty = tie_groups(x), tie_groups(y)
    n0 = n * (n - 1) // 2
    n1 = sum(t * (t - 1) // 2 for t in tx)
    n2 = sum(u * (u - 1) // 2 for u in ty)
    denom = math.sqrt(float(n0 - n1) * float(n0 - n2))
    if denom == 0.0:
        return {"tau": 0.0, "p_value": 1.0}
    tau = (concordant - discordant) / denom
    tau = max(-1.0, min(1.0, tau))

    # tie-adjusted variance of (C - D), normal approximation
    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(t * (t - 1) * (2 * t + 5) for t in tx)
    vu = sum(u * (u - 1) * (2 * u + 5) for u in ty)
    v1 = (sum(t * (t - 1) for t in tx) * sum(u * (u - 1) for u in ty)) / (2.0 * n * (n - 1))
    v2 = 0.0
    if n > 2:
        v2 = (
            sum(t * (t - 1) * (t - 2) for t in tx)
            * sum(u * (u - 1) * (u - 2) for u in ty)
        ) / (9.0 * n * (n - 1) * (n - 2))
    var = (v0 - vt - vu) / 18.0 + v1 + v2
    if var <= 0:
        return {"tau": tau, "p_value": 1.0}
    z = (concordant - discordant) / math.sqrt(var)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return {"tau": tau, "p_value": p}


def association_strength(tau: float) -> str:
    """Qualitative label for a tau value: strong above 0.35, medium above 0.2."""
    if abs(tau) > 0.35:
        return "strong"
    if abs(tau) > 0.2:
        return "medium"
    return "weak"


def sample_comparisons(
    comparisons: Sequence[AggregatedComparison],
    fraction: float,
    seed: int | random.Random | None = None,
) -> list[AggregatedComparison]:
    """Uniform subsample of round(fraction*M) comparisons, coverage-repaired
    so every statement keeps at least one sampled comparison."""
    if not comparisons:
        raise NoData("no comparisons to sample")
    if not 0.0 < fraction <= 1.0:
        raise InvalidInput(f"fraction must be in (0, 1], got {fraction}")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    count = round_half_up(fraction * len(comparisons))
    return sample_with_coverage(
        comparisons, lambda c: (c.pair.a, c.pair.b), count, rng
    )


def _top_set(ranking: Ranking) -> set[str]:
    k = math.ceil(0.2 * len(ranking.ordered))
    return set(ranking.ordered[:k])


def similarity_coefficient(sample_ranking: Ranking, full_ranking: Ranking) -> float:
    """Overlap fraction of the two rankings' top-20% statement sets."""
    if set(sample_ranking.ordered) != set(full_ranking.ordered):
        raise InvalidInput("rankings cover different statement sets")
    top_full = _top_set(full_ranking)
    top_sample = _top_set(sample_ranking)
    return len(top_sample & top_full) / len(top_full)


def run_scalability_experiment(
    comparisons: Sequence[AggregatedComparison],
    simulations: int = 100,
    seed: int | None = None,
    policy_id: str = "",
    fractions: Sequence[float] = DEFAULT_FRACTIONS,
    alpha: float = 0.01,
    tolerance: float = 1e-8,
    max_iterations: int = 10_000,
) -> tuple[list[SamplingReport], list[dict[str, float | str]]]:
    """Subsample, refit, and score against the full-data ranking.

    Dropped comparisons are excluded up front. Each simulation uses the
    derived seed (seed + simulation index) so runs are independent and
    reproducible; tau compares the two rank vectors over the common
    statement set. Returns (per-cell reports, per-fraction summary with
    mean and sample standard deviation).
    """
    decided = [c for c in comparisons if c.outcome != "Dropped"]
    if not decided:
        raise NoData("no decided comparisons")

    def fit_rank(
        subset: Sequence[AggregatedComparison],
        initial: dict[str, float] | None = None,
    ) -> tuple[Ranking, dict[str, float]]:
        model = fit_bradley_terry(
            extract_win_tuples(subset),
            alpha=alpha,
            tolerance=tolerance,
            max_iterations=max_iterations,
            policy_id=policy_id,
            initial=initial,
        )
        return rank_from_model(model), model.abilities

    full_ranking, full_abilities = fit_rank(decided)
    ids = sorted(full_ranking.rank_of)
    full_vector = [full_ranking.rank_of[s] for s in ids]

    reports: list[SamplingReport] = []
    for sim in range(simulations):
        derived = None if seed is None else seed + sim
        rng = random.Random(derived)
        for fraction in fractions:
            subset = sample_comparisons(decided, fraction, rng)
            if len(subset) == len(decided):
                sample_ranking = full_ranking  # refit of the full set is identical
            else:
                # warm-started at the full fit: same unique optimum,
                # far fewer MM iterations on sparse subsets
                sample_ranking, _ = fit_rank(subset, initial=full_abilities)
            kt = kendall_tau([sample_ranking.rank_of[s] for s in ids], full_vector)
            sim_coef = similarity_coefficient(sample_ranking, full_ranking)
            reports.append(SamplingReport(
                policy_id=policy_id,
                simulation=sim,
                fraction=fraction,
                tau=kt["tau"],
                tau_p_value=kt["p_value"],
                similarity=sim_coef,
                seed=derived,
            ))

    summary: list[dict[str, float | str]] = []
    for fraction in fractions:
        rows = [r for r in reports if r.fraction == fraction]
        taus = [r.tau for r in rows]
        sims = [r.similarity for r in rows]
        m = len(rows)

        def sd(vals: list[float]) -> float:
            if len(vals) < 2:
                return 0.0
            mu = sum(vals) / len(vals)
            return math.sqrt(sum((v - mu) ** 2 for v in vals) / (len(vals) - 1))

        mean_tau = sum(taus) / m
        summary.append({
            "fraction": fraction,
            "mean_tau": mean_tau,
            "sd_tau": sd(taus),
            "mean_similarity": sum(sims) / m,
            "sd_similarity": sd(sims),
            "association": association_strength(mean_tau),
        })
    return reports, summary

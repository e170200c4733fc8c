"""Pair enumeration, order-balanced HIT generation, and vote aggregation.

Every unordered statement pair is judged by 6 distinct workers, 3 seeing
it as A-then-B and 3 as B-then-A. Votes are stored canonically relative
to the lexicographically first statement of the pair (+1 it wins, 0 tie,
-1 it loses); the per-pair sum decides the outcome and a zero sum drops
the pair.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

from ._stats import five_number_summary, round_half_up
from .corpus import PolicyDocument
from .errors import (
    CoverageInfeasible,
    EmptyInput,
    IncompleteComparison,
    InvalidChoice,
    NotEnoughStatements,
)

__all__ = [
    "PairKey",
    "Hit",
    "Vote",
    "AggregatedComparison",
    "WinTuple",
    "VOTES_PER_PAIR",
    "enumerate_pairs",
    "generate_hits",
    "canonicalize_vote",
    "aggregate_pair",
    "extract_win_tuples",
    "agreement_summary",
]

VOTES_PER_PAIR = 6
CHOICES = ("first", "equal", "second")


@dataclass(frozen=True, order=True)
class PairKey:
    """Unordered statement pair, canonically oriented a < b."""

    a: str
    b: str

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"pair not canonically ordered: {self.a!r} !< {self.b!r}")


@dataclass
class Hit:
    """One micro-task: a single presentation of a pair to one worker."""

    hit_id: str
    pair: PairKey
    presentation: str  # "AB" | "BA"
    slot: int  # 1..6
    status: str = "open"  # open | assigned | completed
    worker_id: str | None = None


@dataclass(frozen=True)
class Vote:
    hit_id: str
    worker_id: str | None
    choice: str  # first | equal | second
    canonical_score: int  # +1/0/-1 relative to pair.a
    pair: PairKey
    timestamp: float = 0.0


@dataclass(frozen=True)
class AggregatedComparison:
    """Six canonical votes on one pair, reduced to a single outcome."""

    pair: PairKey
    scores: tuple[int, ...]
    sum_score: int
    percent_agreement: float
    outcome: str  # AWins | BWins | Dropped


@dataclass(frozen=True)
class WinTuple:
    winner: str
    loser: str


def enumerate_pairs(doc: PolicyDocument) -> list[PairKey]:
    """All N(N-1)/2 statement pairs of a policy, sorted."""
    ids = sorted(s.statement_id for s in doc.statements)
    if len(ids) < 2:
        raise NotEnoughStatements(
            f"policy {doc.policy_id!r} has {len(ids)} statement(s); need >= 2"
        )
    return [PairKey(ids[i], ids[j]) for i in range(len(ids)) for j in range(i + 1, len(ids))]


T = TypeVar("T")


def _greedy_cover(endpoints: list[tuple[str, str]], statements: list[str]) -> list[int]:
    """Deterministic edge cover: repeatedly take the item covering the most
    still-uncovered statements, ties by input position."""
    uncovered = set(statements)
    cover: list[int] = []
    while uncovered:
        best, best_gain = -1, 0
        for i, (a, b) in enumerate(endpoints):
            gain = (a in uncovered) + (b in uncovered)
            if gain > best_gain:
                best, best_gain = i, gain
                if gain == 2:
                    break
        if best < 0:
            break  # isolated statement: impossible, endpoints define the set
        cover.append(best)
        uncovered.discard(endpoints[best][0])
        uncovered.discard(endpoints[best][1])
    return cover


def sample_with_coverage(
    items: Sequence[T],
    pair_of: Callable[[T], tuple[str, str]],
    count: int,
    rng: random.Random,
) -> list[T]:
    """Uniform sample of `count` items, repaired so every statement that
    appears in `items` appears in at least one sampled item.

    Repair swaps an unsampled item covering uncovered statements in for
    a sampled item whose endpoints stay covered without it. If swapping
    ever gets stuck (possible on sparse pair graphs), the sample is
    rebuilt from a deterministic greedy cover plus a random top-up.
    """
    n = len(items)
    endpoints = [pair_of(it) for it in items]
    statements = sorted({e for ab in endpoints for e in ab})
    lower = math.ceil(len(statements) / 2)
    if count < lower:
        raise CoverageInfeasible(count, lower)
    if count >= n:
        return list(items)
    cover = _greedy_cover(endpoints, statements)
    if len(cover) > count:
        raise CoverageInfeasible(count, len(cover))

    chosen = set(rng.sample(range(n), count))
    coverage: Counter[str] = Counter()
    for i in chosen:
        coverage.update(endpoints[i])

    for _ in range(len(statements)):
        uncovered = [s for s in statements if coverage[s] == 0]
        if not uncovered:
            break
        uncovered_set = set(uncovered)
        candidates = [i for i in range(n) if i not in chosen]
        gains = [(i, (endpoints[i][0] in uncovered_set) + (endpoints[i][1] in uncovered_set))
                 for i in candidates]
        best_gain = max(g for _, g in gains)
        add = rng.choice([i for i, g in gains if g == best_gain])
        chosen.add(add)
        coverage.update(endpoints[add])
        removable = [
            i for i in chosen
            if i != add and coverage[endpoints[i][0]] >= 2 and coverage[endpoints[i][1]] >= 2
        ]
        if not removable:
            break  # stuck; fall through to rebuild
        drop = rng.choice(sorted(removable))
        chosen.remove(drop)
        coverage.subtract(endpoints[drop])

    if any(coverage[s] == 0 for s in statements) or len(chosen) != count:
        chosen = set(cover)
        rest = [i for i in range(n) if i not in chosen]
        chosen.update(rng.sample(rest, count - len(chosen)))

    return [items[i] for i in sorted(chosen)]


def generate_hits(
    pairs: Sequence[PairKey],
    fraction: float = 1.0,
    seed: int | None = None,
) -> list[Hit]:
    """Emit 6 open Hits (3 AB, 3 BA) per sampled pair.

    Samples round(fraction * len(pairs)) pairs (half-up) uniformly at
    random, repaired so every statement stays covered. Deterministic
    given seed.
    """
    if not pairs:
        raise EmptyInput("no pairs to generate hits from")
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    count = round_half_up(fraction * len(pairs))
    rng = random.Random(seed)
    selected = sample_with_coverage(pairs, lambda p: (p.a, p.b), count, rng)
    hits = []
    for pair in selected:
        for slot in range(1, VOTES_PER_PAIR + 1):
            presentation = "AB" if slot <= 3 else "BA"
            hits.append(Hit(
                hit_id=f"{pair.a}~{pair.b}#{slot}",
                pair=pair,
                presentation=presentation,
                slot=slot,
            ))
    return hits


def canonicalize_vote(hit: Hit, choice: str, timestamp: float = 0.0) -> Vote:
    """Re-express a worker's choice relative to pair.a.

    "first"/"second" refer to the on-screen order (the presentation);
    the canonical score is +1 when pair.a was picked, -1 when pair.b
    was, 0 for a tie.
    """
    if choice not in CHOICES:
        raise InvalidChoice(f"choice must be one of {CHOICES}, got {choice!r}")
    if choice == "equal":
        score = 0
    elif (choice == "first") == (hit.presentation == "AB"):
        score = 1
    else:
        score = -1
    return Vote(
        hit_id=hit.hit_id,
        worker_id=hit.worker_id,
        choice=choice,
        canonical_score=score,
        pair=hit.pair,
        timestamp=timestamp,
    )


def aggregate_pair(votes: Sequence[Vote]) -> AggregatedComparison:
    """Reduce the 6 votes on one pair to sum, agreement, and outcome."""
    if len(votes) != VOTES_PER_PAIR:
        raise IncompleteComparison(f"need exactly {VOTES_PER_PAIR} votes, got {len(votes)}")
    pair = votes[0].pair
    if any(v.pair != pair for v in votes):
        raise IncompleteComparison("votes span multiple pairs")
    workers = [v.worker_id for v in votes]
    if len(set(workers)) != VOTES_PER_PAIR:
        raise IncompleteComparison("votes must come from 6 distinct workers")
    scores = tuple(v.canonical_score for v in votes)
    return _aggregate_scores(pair, scores)


def _aggregate_scores(pair: PairKey, scores: tuple[int, ...]) -> AggregatedComparison:
    total = sum(scores)
    counts = Counter(scores)
    agreement = max(counts.values()) / VOTES_PER_PAIR
    if total > 0:
        outcome = "AWins"
    elif total < 0:
        outcome = "BWins"
    else:
        outcome = "Dropped"
    return AggregatedComparison(
        pair=pair,
        scores=scores,
        sum_score=total,
        percent_agreement=agreement,
        outcome=outcome,
    )


def extract_win_tuples(comparisons: Iterable[AggregatedComparison]) -> list[WinTuple]:
    """One (winner, loser) event per decided comparison; Dropped pairs vanish."""
    out = []
    for c in comparisons:
        if c.outcome == "AWins":
            out.append(WinTuple(c.pair.a, c.pair.b))
        elif c.outcome == "BWins":
            out.append(WinTuple(c.pair.b, c.pair.a))
    return out


def agreement_summary(comparisons: Sequence[AggregatedComparison]) -> dict[str, float]:
    """Distribution of percent agreement across comparisons.

    fraction_ge_k = fraction of comparisons where at least k of the 6
    votes agree on the modal option.
    """
    if not comparisons:
        raise EmptyInput("no comparisons to summarize")
    agreements = [c.percent_agreement for c in comparisons]
    modal_counts = [max(Counter(c.scores).values()) for c in comparisons]
    n = len(comparisons)
    summary: dict[str, float] = {
        "mean": sum(agreements) / n,
        **five_number_summary(agreements),
    }
    for k in range(3, VOTES_PER_PAIR + 1):
        summary[f"fraction_ge_{k}"] = sum(1 for m in modal_counts if m >= k) / n
    return summary

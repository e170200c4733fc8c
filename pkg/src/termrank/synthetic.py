"""Synthetic data with known ground truth.

Three generators used by tests, demos and benchmarks:

- planted_policy: a policy document whose statements carry planted
  log-abilities, so a fitted ranking can be scored against truth.
- sample_comparisons_from_abilities: aggregated 6-vote comparisons
  drawn from the planted win probabilities.
- keyword_pool_corpus: a multi-policy corpus where highly-ranked and
  low-ranked statements use disjoint vocabularies, giving a classifier
  task with a known separable structure.
"""

from __future__ import annotations

import math
import random

from .btrank import Ranking
from .classifier.experiment import StatementRecord
from .classifier.preprocess import preprocess
from .corpus import PolicyDocument, segment_policy
from .errors import InvalidInput
from .pairing import (
    VOTES_PER_PAIR,
    AggregatedComparison,
    PairKey,
    _aggregate_scores,
)

__all__ = [
    "planted_policy",
    "sample_comparisons_from_abilities",
    "keyword_pool_corpus",
]

_TOPICS = (
    "refund requests", "late deliveries", "warranty claims", "account closure",
    "data retention", "price changes", "damaged goods", "gift card balances",
    "subscription renewals", "dispute resolution", "custom orders",
    "promotional credits", "address changes", "payment failures",
    "order cancellation", "loyalty points", "restocking charges",
    "shipment tracking", "product recalls", "service interruptions",
    "third party sellers", "digital downloads", "store credit",
    "membership tiers", "billing cycles", "return windows",
    "international orders", "tax collection", "backordered items",
    "privacy requests", "content licensing", "beta features",
    "archived invoices", "chat transcripts", "device compatibility",
    "seasonal discounts", "referral bonuses", "security notices",
    "usage quotas", "export controls",
)

_TEMPLATES = (
    "Section {n} explains how the provider handles {topic}.",
    "Clause {n} sets out the rules that govern {topic}.",
    "Paragraph {n} describes the process for {topic}.",
)


def planted_policy(
    n_statements: int,
    seed: int | None = None,
    spread: float = 2.0,
    policy_id: str = "planted",
    source_url: str = "https://example.com/terms",
) -> tuple[PolicyDocument, dict[str, float]]:
    """A synthetic policy with planted log-abilities.

    Statement texts segment back one-to-one, so the document can be fed
    through ingestion unchanged. Abilities are evenly spaced on
    [-spread, +spread]; with a seed they are shuffled across
    statements, otherwise they decrease with statement index.
    """
    if n_statements < 2:
        raise InvalidInput("need at least 2 statements")
    sentences = []
    for i in range(n_statements):
        topic = _TOPICS[i % len(_TOPICS)]
        if i >= len(_TOPICS):
            topic = f"{topic} under schedule {1 + i // len(_TOPICS)}"
        template = _TEMPLATES[i % len(_TEMPLATES)]
        sentences.append(template.format(n=i + 1, topic=topic))
    raw_text = "\n\n".join(sentences)
    doc = segment_policy(policy_id, source_url, raw_text)
    if len(doc.statements) != n_statements:
        raise InvalidInput("synthetic text did not segment one-to-one")
    step = 2.0 * spread / (n_statements - 1)
    thetas = [spread - i * step for i in range(n_statements)]
    if seed is not None:
        random.Random(seed).shuffle(thetas)
    abilities = {
        s.statement_id: thetas[s.index] for s in doc.statements
    }
    return doc, abilities


def sample_comparisons_from_abilities(
    abilities: dict[str, float],
    seed: int | None = None,
    votes_per_pair: int = VOTES_PER_PAIR,
) -> list[AggregatedComparison]:
    """Draw aggregated comparisons for every pair from a planted model.

    Each vote independently favors the lexicographically first
    statement with its planted win probability; the six scores are then
    majority-aggregated exactly as real votes would be.
    """
    ids = sorted(abilities)
    if len(ids) < 2:
        raise InvalidInput("need at least 2 statements")
    rng = random.Random(seed)
    comparisons = []
    for i, a in enumerate(ids):
        for b in ids[i + 1 :]:
            p_first = 1.0 / (1.0 + math.exp(abilities[b] - abilities[a]))
            scores = tuple(
                1 if rng.random() < p_first else -1 for _ in range(votes_per_pair)
            )
            comparisons.append(_aggregate_scores(PairKey(a, b), scores))
    return comparisons


# ----------------------------------------------------------------------
# keyword-pool classifier corpus

# Pools are disjoint both as surface forms and after stemming, and none
# of the words is a stopword.
_IMPORTANT_WORDS = (
    "refund", "liability", "arbitration", "penalty", "deadline",
    "chargeback", "warranty", "damages", "termination", "forfeit",
    "restocking", "nonreturnable", "dispute", "waiver", "indemnify",
)
_UNIMPORTANT_WORDS = (
    "layout", "banner", "font", "logo", "newsletter",
    "sitemap", "thumbnail", "slideshow", "homepage", "widget",
    "bookmark", "scrollbar", "pixel", "favicon", "tooltip",
)
_NEUTRAL_WORDS = (
    "catalog", "storefront", "inventory", "packaging", "courier",
    "voucher", "checkout", "basket", "invoice", "receipt",
    "merchant", "supplier", "showroom", "kiosk", "brochure",
)

_SENTENCE_SHAPES = (
    "The {w1} policy covers every {w2} and {w3} case.",
    "Customers accept the {w1} terms for each {w2} and {w3}.",
    "Any {w1} request involves the {w2} and the {w3} desk.",
    "Our {w1} rules apply to the {w2} and the {w3} form.",
)


def _pool_sentence(rng: random.Random, pool: tuple[str, ...]) -> str:
    shape = rng.choice(_SENTENCE_SHAPES)
    words = rng.sample(pool, 3)
    return shape.format(w1=words[0], w2=words[1], w3=words[2])


def keyword_pool_corpus(
    n_policies: int = 27,
    statements_per_policy: int = 24,
    seed: int = 0,
) -> tuple[list[StatementRecord], dict[str, Ranking]]:
    """A labeled-by-construction corpus for classifier experiments.

    Each pseudo-policy carries a full ranking. Statements in the top
    quarter of the ranking draw their content words from one pool,
    statements in the bottom half from a disjoint pool, and the
    excluded middle band from a third pool, so any importance threshold
    T <= 25 yields linearly separable classes.
    """
    if n_policies < 2 or statements_per_policy < 4:
        raise InvalidInput("need >= 2 policies and >= 4 statements each")
    rng = random.Random(seed)
    records: list[StatementRecord] = []
    rankings: dict[str, Ranking] = {}
    n = statements_per_policy
    top_quarter = max(1, math.floor(0.25 * n))
    bottom_start = n - n // 2
    for p in range(n_policies):
        policy_id = f"kw{p:03d}"
        ordered = []
        rank_of = {}
        relative_rank = {}
        for position in range(n):
            statement_id = f"{policy_id}-s{position:03d}"
            if position < top_quarter:
                pool = _IMPORTANT_WORDS
            elif position >= bottom_start:
                pool = _UNIMPORTANT_WORDS
            else:
                pool = _NEUTRAL_WORDS
            text = _pool_sentence(rng, pool)
            records.append(
                StatementRecord(
                    statement_id=statement_id,
                    policy_id=policy_id,
                    text=text,
                    tokens=tuple(preprocess(text)),
                )
            )
            ordered.append(statement_id)
            rank_of[statement_id] = position + 1
            relative_rank[statement_id] = (position + 1) / n
        rankings[policy_id] = Ranking(
            policy_id=policy_id,
            ordered=ordered,
            rank_of=rank_of,
            relative_rank=relative_rank,
        )
    return records, rankings

"""Readability scoring and word-importance association.

Flesch Reading Ease with a fixed syllable heuristic, readability versus
rank correlation, and per-word chi-square association between word
presence and statement importance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .btrank import Ranking
from .corpus import _chunks, _has_content, _split_sentences
from .errors import EmptyInput, InvalidInput, InvalidLabels, UnknownStatement
from .sampling import kendall_tau

__all__ = [
    "ReadabilityScore",
    "WordChiSquare",
    "count_syllables",
    "flesch_score",
    "flesch_bucket",
    "readability_vs_rank",
    "chi_square_2x2",
    "chi_square_words",
]

_VOWEL_GROUP = re.compile(r"[aeiouy]+")
_TRAILING_NONALPHA = re.compile(r"[^a-z]+$")
_VOWELS = "aeiouy"


@dataclass(frozen=True)
class ReadabilityScore:
    statement_id: str
    words: int
    sentences: int
    syllables: int
    flesch: float


@dataclass(frozen=True)
class WordChiSquare:
    """Association of one word with the important class.

    Contingency counts: a = important statements containing the word,
    b = unimportant containing, c = important without, d = unimportant
    without.
    """

    word: str
    chi2: float
    a: int
    b: int
    c: int
    d: int


def count_syllables(word: str) -> int:
    """Syllables as maximal vowel groups (a, e, i, o, u, y).

    A terminal "e" is silent and uncounted, except in a consonant+"le"
    ending ("returnable", "little") where it carries the final
    syllable. Never returns less than 1. Non-letter characters act as
    group separators.
    """
    if not word:
        raise InvalidInput("empty token")
    w = word.lower()
    n = len(_VOWEL_GROUP.findall(w))
    core = _TRAILING_NONALPHA.sub("", w)
    if core.endswith("e"):
        silent = not (len(core) >= 3 and core.endswith("le") and core[-3] not in _VOWELS)
        if silent:
            n -= 1
    return max(1, n)


def flesch_score(text: str, statement_id: str = "") -> ReadabilityScore:
    """Flesch Reading Ease: 206.835 - 1.015*(words/sentences) - 84.6*(syllables/words).

    Words are whitespace tokens containing a letter or digit; sentence
    count uses the corpus segmentation rules with a minimum of 1.
    """
    tokens = [t for t in text.split() if any(c.isalnum() for c in t)]
    if not tokens:
        raise InvalidInput("text contains no words")
    sentences = [
        s for chunk in _chunks(text) for s in _split_sentences(chunk) if _has_content(s)
    ]
    n_sentences = max(1, len(sentences))
    n_words = len(tokens)
    n_syllables = sum(count_syllables(t) for t in tokens)
    flesch = 206.835 - 1.015 * (n_words / n_sentences) - 84.6 * (n_syllables / n_words)
    return ReadabilityScore(
        statement_id=statement_id,
        words=n_words,
        sentences=n_sentences,
        syllables=n_syllables,
        flesch=flesch,
    )


def flesch_bucket(score: float) -> str:
    """Coarse difficulty band for a Flesch score."""
    if score < 20:
        return "very_difficult"
    if score < 50:
        return "difficult"
    if score < 80:
        return "standard"
    return "easy"


def readability_vs_rank(
    scores: Mapping[str, float],
    rankings: Sequence[Ranking],
) -> dict[str, float]:
    """Kendall tau-b between Flesch scores and relative ranks, pooled
    across policies. Rank 1 is most important, so a positive tau means
    easier statements sit lower in importance."""
    if not scores:
        raise EmptyInput("no readability scores")
    relative: dict[str, float] = {}
    for ranking in rankings:
        relative.update(ranking.relative_rank)
    xs, ys = [], []
    for statement_id in sorted(scores):
        if statement_id not in relative:
            raise UnknownStatement(f"statement {statement_id!r} has no rank")
        xs.append(scores[statement_id])
        ys.append(relative[statement_id])
    return kendall_tau(xs, ys)


def chi_square_2x2(a: int, b: int, c: int, d: int) -> float:
    """Pearson chi-square of a 2x2 table [[a, b], [c, d]], closed form
    N(ad - bc)^2 / ((a+b)(c+d)(a+c)(b+d)); 0 when any marginal is 0."""
    n = a + b + c + d
    denom = (a + b) * (c + d) * (a + c) * (b + d)
    if denom == 0:
        return 0.0
    num = float(a * d - b * c)
    return n * num * num / denom


def chi_square_words(
    token_lists: Sequence[Sequence[str]],
    labels: Sequence[bool],
    top_k: int = 20,
) -> list[WordChiSquare]:
    """Top words most associated with the important class.

    One presence/absence x important/unimportant table per distinct
    token, scored by Pearson chi-square (no continuity correction).
    Returns the top_k by descending chi2, ties by token order.
    """
    if len(token_lists) != len(labels):
        raise InvalidLabels(
            f"{len(token_lists)} statements vs {len(labels)} labels"
        )
    n_important = sum(1 for v in labels if v)
    n_unimportant = len(labels) - n_important
    if n_important == 0 or n_unimportant == 0:
        raise InvalidLabels("both importance classes must be non-empty")

    presence_important: dict[str, int] = {}
    presence_unimportant: dict[str, int] = {}
    for tokens, important in zip(token_lists, labels):
        for token in set(tokens):
            target = presence_important if important else presence_unimportant
            target[token] = target.get(token, 0) + 1

    rows = []
    for token in sorted(set(presence_important) | set(presence_unimportant)):
        a = presence_important.get(token, 0)
        b = presence_unimportant.get(token, 0)
        c = n_important - a
        d = n_unimportant - b
        rows.append(WordChiSquare(token, chi_square_2x2(a, b, c, d), a, b, c, d))
    rows.sort(key=lambda r: (-r.chi2, r.word))
    return rows[:top_k]

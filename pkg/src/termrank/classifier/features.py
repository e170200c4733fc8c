"""Statement feature vectors: tf-idf-weighted mean of word embeddings.

Embeddings are an input file (the original embedding corpus is not
distributable). For tests and self-contained runs a fallback table
synthesizes a deterministic pseudo-random unit vector per token, keyed
by a seed, so lookups are total without shipping any trained vectors.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..errors import EmptyInput, InvalidInput

__all__ = [
    "EmbeddingTable",
    "fallback_embeddings",
    "load_embeddings",
    "save_embeddings",
    "TfIdf",
    "build_tfidf",
    "FeatureVector",
    "featurize",
    "DEFAULT_DIMENSION",
]

DEFAULT_DIMENSION = 100


def _fallback_vector(token: str, seed: int, dimension: int) -> np.ndarray:
    digest = hashlib.blake2b(f"{seed}:{token}".encode(), digest_size=8).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "big"))
    v = rng.standard_normal(dimension)
    return v / np.linalg.norm(v)


@dataclass
class EmbeddingTable:
    """token -> vector mapping, optionally backed by the fallback generator.

    With generator_seed set, unknown tokens get a synthesized unit
    vector on first lookup (total lookup); otherwise get() returns None
    for out-of-vocabulary tokens and featurize skips them.
    """

    dimension: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)
    generator_seed: int | None = None

    @property
    def vocabulary_size(self) -> int:
        return len(self.vectors)

    def get(self, token: str) -> np.ndarray | None:
        v = self.vectors.get(token)
        if v is None and self.generator_seed is not None:
            v = _fallback_vector(token, self.generator_seed, self.dimension)
            self.vectors[token] = v
        return v


def fallback_embeddings(seed: int, dimension: int = DEFAULT_DIMENSION) -> EmbeddingTable:
    return EmbeddingTable(dimension=dimension, generator_seed=seed)


def save_embeddings(table: EmbeddingTable, path: str | Path) -> None:
    """Text format: header "V D", then one "token v1 ... vD" line per token."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{table.vocabulary_size} {table.dimension}\n")
        for token in sorted(table.vectors):
            values = " ".join(repr(float(x)) for x in table.vectors[token])
            f.write(f"{token} {values}\n")


def load_embeddings(path: str | Path) -> EmbeddingTable:
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise InvalidInput(f"{path}: malformed embedding header")
        count, dimension = int(header[0]), int(header[1])
        vectors: dict[str, np.ndarray] = {}
        for line in f:
            parts = line.split()
            if not parts:
                continue
            token, values = parts[0], parts[1:]
            if len(values) != dimension:
                raise InvalidInput(
                    f"{path}: token {token!r} has {len(values)} values, expected {dimension}"
                )
            vectors[token] = np.array([float(v) for v in values])
    if len(vectors) != count:
        raise InvalidInput(f"{path}: header declares {count} tokens, found {len(vectors)}")
    return EmbeddingTable(dimension=dimension, vectors=vectors)


class TfIdf:
    """tf = raw count in the statement; idf = ln((1+D)/(1+df)) + 1."""

    def __init__(self, document_frequency: dict[str, int], n_documents: int):
        self.document_frequency = dict(document_frequency)
        self.n_documents = n_documents

    def idf(self, token: str) -> float:
        df = self.document_frequency.get(token, 0)
        return math.log((1 + self.n_documents) / (1 + df)) + 1.0

    def __call__(self, token: str, statement_tokens: Sequence[str]) -> float:
        tf = sum(1 for t in statement_tokens if t == token)
        return tf * self.idf(token)

    def weights(self, statement_tokens: Sequence[str]) -> dict[str, float]:
        counts = Counter(statement_tokens)
        return {t: c * self.idf(t) for t, c in counts.items()}


def build_tfidf(corpus: Iterable[Sequence[str]]) -> TfIdf:
    df: Counter[str] = Counter()
    n = 0
    for tokens in corpus:
        n += 1
        df.update(set(tokens))
    if n == 0:
        raise EmptyInput("tf-idf needs a non-empty corpus")
    return TfIdf(dict(df), n)


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    empty: bool  # no in-vocabulary token contributed


def featurize(
    tokens: Sequence[str],
    tfidf: TfIdf,
    embeddings: EmbeddingTable,
) -> FeatureVector:
    """tf-idf-weighted mean of the tokens' embedding vectors, L2-normalized.

    Out-of-vocabulary tokens contribute to neither sum. A statement
    with no embeddable token maps to the zero vector, flagged empty.
    """
    acc = np.zeros(embeddings.dimension)
    total_weight = 0.0
    for token, weight in tfidf.weights(tokens).items():
        vec = embeddings.get(token)
        if vec is None or weight == 0.0:
            continue
        acc += weight * vec
        total_weight += weight
    if total_weight == 0.0:
        return FeatureVector(values=acc, empty=True)
    acc /= total_weight
    norm = np.linalg.norm(acc)
    if norm > 0:
        acc = acc / norm
    return FeatureVector(values=acc, empty=False)

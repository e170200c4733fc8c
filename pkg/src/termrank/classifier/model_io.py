"""Save and load a trained importance predictor.

The bundle is one JSON file carrying everything prediction needs:
the SVM (support vectors, dual coefficients, bias), the idf statistics
of the training corpus, and an embedding descriptor — either the
fallback-generator seed or the vectors themselves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import InvalidInput
from .features import EmbeddingTable, FeatureVector, TfIdf, featurize
from .preprocess import PIPELINE_VERSION, preprocess
from .svm import SVMModel

__all__ = ["PredictorBundle", "save_predictor", "load_predictor"]

_FORMAT = 1


@dataclass
class PredictorBundle:
    model: SVMModel
    tfidf: TfIdf
    embeddings: EmbeddingTable
    pipeline_version: str
    metadata: dict

    def featurize_text(self, text: str) -> FeatureVector:
        return featurize(preprocess(text), self.tfidf, self.embeddings)

    def predict_texts(self, texts: Sequence[str]) -> list[dict]:
        """Per text: predicted label and the decision value behind it."""
        rows = np.array([self.featurize_text(t).values for t in texts])
        decisions = self.model.decision_function(rows)
        return [
            {
                "predicted_label": "important" if d >= 0 else "unimportant",
                "decision_value": float(d),
            }
            for d in decisions
        ]


def _embedding_descriptor(embeddings: EmbeddingTable, inline_vocabulary) -> dict:
    if embeddings.generator_seed is not None:
        return {
            "kind": "fallback",
            "seed": embeddings.generator_seed,
            "dimension": embeddings.dimension,
        }
    vectors = {
        token: [float(x) for x in vec]
        for token, vec in embeddings.vectors.items()
        if inline_vocabulary is None or token in inline_vocabulary
    }
    return {"kind": "inline", "dimension": embeddings.dimension, "vectors": vectors}


def save_predictor(
    path: str | Path,
    model: SVMModel,
    tfidf: TfIdf,
    embeddings: EmbeddingTable,
    metadata: dict | None = None,
) -> None:
    """File-backed tables are inlined restricted to the training
    vocabulary (unseen tokens would carry zero idf weight anyway)."""
    inline_vocab = set(tfidf.document_frequency) if embeddings.generator_seed is None else None
    payload = {
        "format": _FORMAT,
        "pipeline_version": PIPELINE_VERSION,
        "kernel": model.kernel,
        "C": model.C,
        "gamma": model.gamma,
        "bias": model.bias,
        "support_vectors": [[float(x) for x in row] for row in model.support_vectors],
        "dual_coef": [float(x) for x in model.dual_coef],
        "model_metadata": model.metadata,
        "idf": {
            "n_documents": tfidf.n_documents,
            "document_frequency": tfidf.document_frequency,
        },
        "embeddings": _embedding_descriptor(embeddings, inline_vocab),
        "metadata": metadata or {},
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_predictor(path: str | Path) -> PredictorBundle:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != _FORMAT:
        raise InvalidInput(f"{path}: unsupported predictor format")
    if payload.get("pipeline_version") != PIPELINE_VERSION:
        raise InvalidInput(
            f"{path}: predictor built with pipeline "
            f"{payload.get('pipeline_version')!r}, this build is {PIPELINE_VERSION!r}"
        )
    model = SVMModel(
        kernel=payload["kernel"],
        C=payload["C"],
        gamma=payload["gamma"],
        support_vectors=np.array(payload["support_vectors"], dtype=float),
        dual_coef=np.array(payload["dual_coef"], dtype=float),
        bias=payload["bias"],
        metadata=payload.get("model_metadata", {}),
    )
    tfidf = TfIdf(
        payload["idf"]["document_frequency"], payload["idf"]["n_documents"]
    )
    desc = payload["embeddings"]
    if desc["kind"] == "fallback":
        embeddings = EmbeddingTable(dimension=desc["dimension"], generator_seed=desc["seed"])
    elif desc["kind"] == "inline":
        embeddings = EmbeddingTable(
            dimension=desc["dimension"],
            vectors={t: np.array(v, dtype=float) for t, v in desc["vectors"].items()},
        )
    else:
        raise InvalidInput(f"{path}: unknown embedding descriptor {desc.get('kind')!r}")
    return PredictorBundle(
        model=model,
        tfidf=tfidf,
        embeddings=embeddings,
        pipeline_version=payload["pipeline_version"],
        metadata=payload.get("metadata", {}),
    )

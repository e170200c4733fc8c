"""Readers and writers for the on-disk interchange formats.

Everything round-trips: each *_to_csv / *_to_json writer has a parser
that reconstructs the objects the analysis functions consume, so
datasets can move between the service, the CLI, and offline scripts as
plain files.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .btrank import BTModel
from .corpus import PolicyDocument, Statement
from .errors import InvalidInput
from .pairing import VOTES_PER_PAIR, AggregatedComparison, PairKey, WinTuple
from .sampling import SamplingReport
from .textstats import ReadabilityScore, WordChiSquare

__all__ = [
    "read_policy_input",
    "statements_to_json",
    "statements_from_json",
    "comparisons_to_csv",
    "comparisons_from_csv",
    "win_tuples_to_csv",
    "win_tuples_from_csv",
    "ranking_to_csv",
    "model_to_json",
    "model_from_json",
    "scalability_to_csv",
    "scalability_summary_to_json",
    "readability_to_csv",
    "chi_square_to_csv",
    "predictions_to_csv",
]

COMPARISONS_HEADER = (
    ["policy_id", "statement_a", "statement_b"]
    + [f"score_{i}" for i in range(1, VOTES_PER_PAIR + 1)]
    + ["sum", "agreement", "outcome"]
)


def _writer(buffer: io.StringIO):
    return csv.writer(buffer, lineterminator="\n")


def _policy_of(statement_id: str) -> str:
    # statement ids are "<policy_id>-s<index>"
    return statement_id.rsplit("-s", 1)[0]


# ----------------------------------------------------------------------
# policy input and statement store


def read_policy_input(path: str | Path) -> dict:
    """Load a policy source file.

    JSON files must carry {policy_id?, source_url?, raw_text}; anything
    else is treated as UTF-8 plain text.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"{path}: not valid JSON ({exc})") from exc
        if not isinstance(data, dict) or "raw_text" not in data:
            raise InvalidInput(f"{path}: JSON policy input needs a raw_text field")
        return {
            "policy_id": data.get("policy_id"),
            "source_url": data.get("source_url", ""),
            "raw_text": data["raw_text"],
        }
    return {"policy_id": None, "source_url": "", "raw_text": text}


def statements_to_json(documents: Iterable[PolicyDocument]) -> str:
    rows = [
        {
            "statement_id": s.statement_id,
            "policy_id": s.policy_id,
            "index": s.index,
            "text": s.text,
        }
        for doc in documents
        for s in doc.statements
    ]
    return json.dumps(rows, indent=2)


def statements_from_json(text: str) -> list[Statement]:
    rows = json.loads(text)
    return [
        Statement(
            statement_id=r["statement_id"],
            policy_id=r["policy_id"],
            index=r["index"],
            text=r["text"],
            word_count=len(r["text"].split()),
        )
        for r in rows
    ]


# ----------------------------------------------------------------------
# comparisons and win tuples


def comparisons_to_csv(comparisons: Iterable[AggregatedComparison]) -> str:
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(COMPARISONS_HEADER)
    for comp in comparisons:
        writer.writerow(
            [_policy_of(comp.pair.a), comp.pair.a, comp.pair.b]
            + list(comp.scores)
            + [comp.sum_score, repr(comp.percent_agreement), comp.outcome]
        )
    return buffer.getvalue()


def comparisons_from_csv(text: str) -> list[AggregatedComparison]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != COMPARISONS_HEADER:
        raise InvalidInput("comparisons file has an unexpected header")
    comparisons = []
    for row in reader:
        if not row:
            continue
        scores = tuple(int(v) for v in row[3 : 3 + VOTES_PER_PAIR])
        comparisons.append(
            AggregatedComparison(
                pair=PairKey(row[1], row[2]),
                scores=scores,
                sum_score=int(row[3 + VOTES_PER_PAIR]),
                percent_agreement=float(row[4 + VOTES_PER_PAIR]),
                outcome=row[5 + VOTES_PER_PAIR],
            )
        )
    return comparisons


def win_tuples_to_csv(tuples: Iterable[WinTuple]) -> str:
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(["policy_id", "winner", "loser"])
    for t in tuples:
        writer.writerow([_policy_of(t.winner), t.winner, t.loser])
    return buffer.getvalue()


def win_tuples_from_csv(text: str) -> list[WinTuple]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["policy_id", "winner", "loser"]:
        raise InvalidInput("win-tuples file has an unexpected header")
    return [WinTuple(winner=row[1], loser=row[2]) for row in reader if row]


# ----------------------------------------------------------------------
# rankings and fitted models


def ranking_to_csv(rows: Iterable[Mapping]) -> str:
    """Rows need policy_id, rank, statement_id, theta and text keys
    (the shape TaskService.get_ranking emits, plus policy_id)."""
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(["policy_id", "rank", "statement_id", "theta", "text"])
    for row in rows:
        writer.writerow(
            [
                row.get("policy_id", _policy_of(row["statement_id"])),
                row["rank"],
                row["statement_id"],
                repr(float(row["theta"])),
                row.get("text", ""),
            ]
        )
    return buffer.getvalue()


def model_to_json(model: BTModel) -> str:
    return json.dumps(
        {
            "policy_id": model.policy_id,
            "abilities": dict(sorted(model.abilities.items())),
            "alpha": model.regularization,
            "converged": model.converged,
            "iterations": model.iterations,
            "uncompared": sorted(model.uncompared),
        },
        indent=2,
    )


def model_from_json(text: str) -> BTModel:
    data = json.loads(text)
    return BTModel(
        policy_id=data.get("policy_id", ""),
        abilities={k: float(v) for k, v in data["abilities"].items()},
        iterations=int(data.get("iterations", 0)),
        converged=bool(data.get("converged", True)),
        regularization=float(data["alpha"]),
        uncompared=frozenset(data.get("uncompared", ())),
        loglik_trace=(),
    )


# ----------------------------------------------------------------------
# scalability reports


def scalability_to_csv(reports: Iterable[SamplingReport]) -> str:
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(
        ["policy_id", "simulation", "fraction", "tau", "p_value", "similarity"]
    )
    for r in reports:
        writer.writerow(
            [
                r.policy_id,
                r.simulation,
                repr(r.fraction),
                repr(r.tau),
                repr(r.tau_p_value),
                repr(r.similarity),
            ]
        )
    return buffer.getvalue()


def scalability_summary_to_json(policy_id: str, summary: Sequence[Mapping]) -> str:
    return json.dumps({"policy_id": policy_id, "fractions": list(summary)}, indent=2)


# ----------------------------------------------------------------------
# readability and word association reports


def readability_to_csv(
    scores: Iterable[ReadabilityScore],
    relative_rank: Mapping[str, float],
) -> str:
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(["statement_id", "words", "syllables", "flesch", "relative_rank"])
    for s in sorted(scores, key=lambda s: s.statement_id):
        writer.writerow(
            [
                s.statement_id,
                s.words,
                s.syllables,
                repr(s.flesch),
                repr(float(relative_rank[s.statement_id])),
            ]
        )
    return buffer.getvalue()


def chi_square_to_csv(results: Iterable[WordChiSquare]) -> str:
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(["word", "chi2", "a", "b", "c", "d"])
    for r in results:
        writer.writerow([r.word, repr(r.chi2), r.a, r.b, r.c, r.d])
    return buffer.getvalue()


# ----------------------------------------------------------------------
# classifier predictions


def predictions_to_csv(rows: Iterable[Mapping]) -> str:
    """Rows need policy_id, statement_id, predicted_label, decision_value."""
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(["policy_id", "statement_id", "predicted_label", "decision_value"])
    for row in rows:
        writer.writerow(
            [
                row["policy_id"],
                row["statement_id"],
                row["predicted_label"],
                repr(float(row["decision_value"])),
            ]
        )
    return buffer.getvalue()

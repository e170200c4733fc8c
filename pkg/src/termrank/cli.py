"""Command-line front end.

Subcommands operate on one shared data directory (``--data-dir`` or the
TERMRANK_DATA environment variable) holding the service event log;
analysis commands additionally write export files next to it. Every
randomized command takes ``--seed`` and is deterministic when given
one.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from . import formats
from .btrank import Ranking, correlation_checks
from .classifier.experiment import (
    BAND_BOTTOM,
    BAND_TOP,
    LABEL_IMPORTANT,
    LABEL_UNIMPORTANT,
    LabeledStatement,
    StatementRecord,
    bin_labels,
    run_experiment,
    train_svm,
)
from .classifier.features import (
    EmbeddingTable,
    build_tfidf,
    fallback_embeddings,
    featurize,
    load_embeddings,
)
from .classifier.model_io import load_predictor, save_predictor
from .classifier.preprocess import preprocess
from .corpus import segment_policy
from .errors import TermRankError
from .pairing import agreement_summary
from .sampling import DEFAULT_FRACTIONS, run_scalability_experiment
from .service import TaskService, create_app
from .textstats import chi_square_words, flesch_score, readability_vs_rank

ENV_DATA_DIR = "TERMRANK_DATA"


def _data_dir(args: argparse.Namespace) -> Path:
    if args.data_dir:
        return Path(args.data_dir)
    return Path(os.environ.get(ENV_DATA_DIR, "./termrank-data"))


def _service(args: argparse.Namespace) -> TaskService:
    seed = getattr(args, "seed", None)
    rng = random.Random(seed) if seed is not None else None
    return TaskService(_data_dir(args), rng=rng)


def _write(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")
    print(f"wrote {path}")


# ----------------------------------------------------------------------
# subcommand handlers


def _cmd_ingest(args) -> None:
    service = _service(args)
    data = formats.read_policy_input(args.path)
    result = service.ingest_policy(
        data["raw_text"],
        policy_id=args.policy_id or data["policy_id"],
        source_url=args.source_url or data["source_url"],
    )
    print(f"ingested {result['policy_id']}: {result['statements']} statements")


def _cmd_gen_hits(args) -> None:
    service = _service(args)
    result = service.generate_policy_hits(
        args.policy_id, fraction=args.fraction, seed=args.seed
    )
    print(
        f"{result['policy_id']}: {result['pairs']} pairs, {result['hits']} hits"
    )


def _cmd_serve(args) -> None:
    import uvicorn

    app = create_app(_service(args))
    uvicorn.run(app, host=args.host, port=args.port)


def _cmd_simulate(args) -> None:
    service = _service(args)
    planted = None
    if args.planted:
        planted = {
            k: float(v)
            for k, v in json.loads(Path(args.planted).read_text()).items()
        }
    result = service.simulate_workers(
        args.policy_id,
        worker_count=args.workers,
        noise=args.noise,
        planted=planted,
        seed=args.seed,
        tie_probability=args.tie_prob,
    )
    print(
        f"{args.policy_id}: {result['votes_cast']} votes by "
        f"{len(result['workers'])} workers, "
        f"{result['pairs_fully_voted']} pairs fully voted"
    )


def _cmd_aggregate(args) -> None:
    service = _service(args)
    comparisons = service.get_comparisons(args.policy_id)
    out = Path(args.out) if args.out else _data_dir(args) / f"{args.policy_id}-comparisons.csv"
    _write(out, formats.comparisons_to_csv(comparisons))
    print(f"{len(comparisons)} fully-voted pairs")


def _cmd_rank(args) -> None:
    service = _service(args)
    result = service.get_ranking(args.policy_id, alpha=args.alpha)
    rows = [dict(row, policy_id=args.policy_id) for row in result["ranking"]]
    out = Path(args.out) if args.out else _data_dir(args) / f"{args.policy_id}-ranking.csv"
    _write(out, formats.ranking_to_csv(rows))
    note = "converged" if result["converged"] else "NOT converged"
    print(f"fit {note} after {result['iterations']} iterations")
    for row in rows[:5]:
        print(f"  #{row['rank']:>3} {row['statement_id']} theta={row['theta']:+.4f}")


def _cmd_scalability(args) -> None:
    service = _service(args)
    comparisons = service.get_comparisons(args.policy_id)
    fractions = (
        tuple(float(f) for f in args.fractions.split(","))
        if args.fractions
        else DEFAULT_FRACTIONS
    )
    reports, summary = run_scalability_experiment(
        comparisons,
        simulations=args.simulations,
        seed=args.seed,
        policy_id=args.policy_id,
        fractions=fractions,
    )
    base = _data_dir(args)
    _write(base / f"{args.policy_id}-scalability.csv", formats.scalability_to_csv(reports))
    _write(
        base / f"{args.policy_id}-scalability-summary.json",
        formats.scalability_summary_to_json(args.policy_id, summary),
    )
    for row in summary:
        print(
            f"  fraction {row['fraction']:.1f}: "
            f"tau {row['mean_tau']:.3f} (sd {row['sd_tau']:.3f}), "
            f"similarity {row['mean_similarity']:.3f} ({row['association']})"
        )


def _ranking_from_result(result: dict) -> Ranking:
    ordered = [row["statement_id"] for row in result["ranking"]]
    n = len(ordered)
    return Ranking(
        policy_id=result["policy_id"],
        ordered=ordered,
        rank_of={s: i + 1 for i, s in enumerate(ordered)},
        relative_rank={s: (i + 1) / n for i, s in enumerate(ordered)},
    )


def _cmd_stats(args) -> None:
    service = _service(args)
    base = _data_dir(args)
    if args.report == "agreement":
        summary = agreement_summary(service.get_comparisons(args.policy_id))
        for key, value in summary.items():
            print(f"  {key}: {value:.4f}")
        return
    ranking = _ranking_from_result(service.get_ranking(args.policy_id))
    if args.report == "correlation":
        checks = correlation_checks(service.get_comparisons(args.policy_id), ranking)
        for name, stats in checks.items():
            print(f"  {name}: r={stats['r']:+.4f} p={stats['p_value']:.3g}")
        return
    statements = service.policy_statements(args.policy_id)
    if args.report == "readability":
        scores = [
            flesch_score(s["text"], statement_id=s["statement_id"])
            for s in statements
        ]
        _write(
            base / f"{args.policy_id}-readability.csv",
            formats.readability_to_csv(scores, ranking.relative_rank),
        )
        flesch = {s.statement_id: s.flesch for s in scores}
        tau = readability_vs_rank(flesch, [ranking])
        print(f"  tau={tau['tau']:+.4f} p={tau['p_value']:.3g}")
        return
    if args.report == "chi2":
        tokens = [preprocess(s["text"]) for s in statements]
        labels = [
            ranking.relative_rank[s["statement_id"]] <= args.threshold / 100.0
            for s in statements
        ]
        results = chi_square_words(tokens, labels, top_k=args.top_k)
        _write(
            base / f"{args.policy_id}-chi2.csv", formats.chi_square_to_csv(results)
        )
        for r in results[:10]:
            print(f"  {r.word}: chi2={r.chi2:.3f} (a={r.a} b={r.b} c={r.c} d={r.d})")
        return
    raise TermRankError(f"unknown stats report {args.report!r}")


def _load_corpus(service: TaskService, policy_ids: list[str]):
    records = []
    rankings = {}
    for policy_id in policy_ids:
        rankings[policy_id] = _ranking_from_result(service.get_ranking(policy_id))
        for s in service.policy_statements(policy_id):
            records.append(StatementRecord(
                statement_id=s["statement_id"],
                policy_id=policy_id,
                text=s["text"],
                tokens=tuple(preprocess(s["text"])),
            ))
    return records, rankings


def _embeddings_from_args(args) -> EmbeddingTable:
    if args.embeddings:
        return load_embeddings(args.embeddings)
    return fallback_embeddings(seed=args.fallback_seed)


def _cmd_train(args) -> None:
    service = _service(args)
    policy_ids = (
        args.policies.split(",")
        if args.policies
        else [p["policy_id"] for p in service.list_policies()]
    )
    records, rankings = _load_corpus(service, policy_ids)
    embeddings = _embeddings_from_args(args)
    results = run_experiment(
        records,
        rankings,
        embeddings,
        T_values=[args.T],
        bootstraps=args.bootstraps,
        seed=args.seed,
    )
    report = results[args.T]
    print(
        f"T={args.T}: balanced accuracy {report['balanced_accuracy']:.4f}, "
        f"recall {report['recall']:.4f}, precision {report['precision']:.4f}"
    )
    modal = report["modal_choice"]
    gamma = "none" if modal.gamma is None else f"{modal.gamma:g}"
    print(f"  modal grid choice: kernel={modal.kernel} C={modal.C:g} gamma={gamma}")

    # refit on every labeled row with the modal grid choice and persist
    tfidf = build_tfidf([r.tokens for r in records])
    rows = []
    for policy_id in sorted(rankings):
        bands = bin_labels(rankings[policy_id], args.T)
        for record in records:
            if record.policy_id != policy_id:
                continue
            band = bands.get(record.statement_id)
            if band not in (BAND_TOP, BAND_BOTTOM):
                continue
            rows.append(LabeledStatement(
                statement_id=record.statement_id,
                feature=featurize(record.tokens, tfidf, embeddings).values,
                label=LABEL_IMPORTANT if band == BAND_TOP else LABEL_UNIMPORTANT,
                band=band,
            ))
    model = train_svm(
        rows, kernel=modal.kernel, C=modal.C, gamma=modal.gamma, seed=args.seed
    )
    out = Path(args.out) if args.out else _data_dir(args) / "predictor.json"
    save_predictor(
        out,
        model,
        tfidf,
        embeddings,
        metadata={"T": args.T, "seed": args.seed, "policies": policy_ids},
    )
    print(f"wrote {out}")


def _cmd_predict(args) -> None:
    bundle = load_predictor(args.model)
    data = formats.read_policy_input(args.path)
    policy_id = args.policy_id or data["policy_id"] or "input"
    doc = segment_policy(policy_id, data["source_url"], data["raw_text"])
    predictions = bundle.predict_texts([s.text for s in doc.statements])
    rows = [
        {
            "policy_id": policy_id,
            "statement_id": s.statement_id,
            "predicted_label": p["predicted_label"],
            "decision_value": p["decision_value"],
        }
        for s, p in zip(doc.statements, predictions)
    ]
    csv_text = formats.predictions_to_csv(rows)
    if args.out:
        _write(Path(args.out), csv_text)
    else:
        sys.stdout.write(csv_text)


# ----------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="termrank",
        description="Rank terms-and-conditions statements by crowd-perceived importance.",
    )
    parser.add_argument(
        "--data-dir",
        default=None,
        help=f"service data directory (default: ${ENV_DATA_DIR} or ./termrank-data)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="segment a policy file into statements")
    p.add_argument("path")
    p.add_argument("--policy-id", default=None)
    p.add_argument("--source-url", default="")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("gen-hits", help="enumerate pairs and create voting tasks")
    p.add_argument("policy_id")
    p.add_argument("--fraction", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_gen_hits)

    p = sub.add_parser("serve", help="run the HTTP task service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("simulate", help="drain open tasks with synthetic workers")
    p.add_argument("policy_id")
    p.add_argument("--workers", type=int, default=6)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--tie-prob", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--planted", default=None, help="JSON file {statement_id: theta}")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("aggregate", help="export fully-voted pair outcomes as CSV")
    p.add_argument("policy_id")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_aggregate)

    p = sub.add_parser("rank", help="fit the paired-comparison model and export the ranking")
    p.add_argument("policy_id")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("scalability", help="rank-stability experiment under subsampling")
    p.add_argument("policy_id")
    p.add_argument("--simulations", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--fractions", default=None, help="comma-separated, e.g. 0.2,0.5,1.0")
    p.set_defaults(func=_cmd_scalability)

    p = sub.add_parser("stats", help="descriptive reports over a ranked policy")
    p.add_argument("report", choices=["readability", "chi2", "agreement", "correlation"])
    p.add_argument("policy_id")
    p.add_argument("--threshold", type=float, default=25.0, help="top-T%% labeled important (chi2)")
    p.add_argument("--top-k", type=int, default=20)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("train", help="train the importance classifier on ranked policies")
    p.add_argument("--T", type=float, default=15.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bootstraps", type=int, default=10)
    p.add_argument("--policies", default=None, help="comma-separated policy ids (default: all)")
    p.add_argument("--embeddings", default=None, help="embedding file (V D header format)")
    p.add_argument("--fallback-seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="label the statements of a new policy file")
    p.add_argument("path")
    p.add_argument("--model", required=True)
    p.add_argument("--policy-id", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_predict)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except TermRankError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Task-allocation service state, persisted as an append-only event log.

Every mutation is an event appended to events.jsonl and then applied to
the in-memory state; constructing a service over an existing log
replays it and reconstructs the exact state. Events carry their
outcomes (which hit was assigned, what was voted), so replay needs no
randomness and no clock.

All commands are serialized through one lock: correctness never depends
on request arrival order beyond that point, and two concurrent
assignment calls can never hand out the same hit.
"""

from __future__ import annotations

import json
import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator

from ..btrank import fit_bradley_terry, rank_from_model
from ..corpus import PolicyDocument, Statement, segment_policy
from ..errors import (
    ConflictingResubmission,
    InsufficientWorkers,
    InvalidChoice,
    InvalidInput,
    NoData,
    NoTaskAvailable,
    StaleAssignment,
    UnknownPolicy,
    UnknownWorker,
)
from ..pairing import (
    CHOICES,
    VOTES_PER_PAIR,
    AggregatedComparison,
    Hit,
    PairKey,
    Vote,
    aggregate_pair,
    canonicalize_vote,
    enumerate_pairs,
    extract_win_tuples,
    generate_hits,
)

__all__ = ["TaskService", "DEFAULT_LEASE_SECONDS"]

DEFAULT_LEASE_SECONDS = 600.0


@dataclass
class _ServiceHit:
    hit_id: str
    policy_id: str
    a: str
    b: str
    presentation: str
    slot: int
    status: str = "open"  # open | assigned | completed
    worker_id: str | None = None
    expires_at: float | None = None


@dataclass
class _PairState:
    policy_id: str
    hit_ids: list[str] = field(default_factory=list)
    votes: list[dict] = field(default_factory=list)


@dataclass
class _Worker:
    worker_id: str
    qualified: bool
    completed_pairs: set[tuple[str, str]] = field(default_factory=set)
    active: dict[str, tuple[str, str]] = field(default_factory=dict)  # hit_id -> pair
    votes_cast: int = 0


@dataclass
class _Policy:
    policy_id: str
    source_url: str
    statements: list[dict]
    text_of: dict[str, str]
    hits_generated: bool = False
    hit_ids: list[str] = field(default_factory=list)
    pair_tuples: list[tuple[str, str]] = field(default_factory=list)


class TaskService:
    """Single-writer task allocator over an append-only event log.

    clock and rng are injectable so tests can drive lease expiry and
    make assignment choices reproducible.
    """

    def __init__(
        self,
        data_dir: str | Path,
        clock: Callable[[], float] = time.time,
        rng: random.Random | None = None,
        lease_seconds: float = DEFAULT_LEASE_SECONDS,
    ):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._log_path = self.data_dir / "events.jsonl"
        self._clock = clock
        self._rng = rng if rng is not None else random.Random()
        self.lease_seconds = lease_seconds
        self._lock = threading.RLock()

        self._sequence = 0
        self._policies: dict[str, _Policy] = {}
        self._workers: dict[str, _Worker] = {}
        self._hits: dict[str, _ServiceHit] = {}
        self._pairs: dict[tuple[str, str], _PairState] = {}
        self._open_counts: dict[tuple[str, str], int] = {}
        self._leases: dict[str, float] = {}
        self._worker_count = 0

        self._replay()
        self._log_file = open(self._log_path, "a", encoding="utf-8")

    # ------------------------------------------------------------------
    # event machinery

    def _replay(self) -> None:
        """Rebuild state from the log, repairing an interrupted last write.

        A ragged tail is truncated away (its event was never acked) and a
        final line missing its newline gets one, so that events appended
        by this process always land after, not inside, the last good line.
        """
        if not self._log_path.exists():
            return
        good = 0  # byte offset just past the last intact line
        terminated = True
        with open(self._log_path, "rb") as f:
            for raw in f:
                stripped = raw.strip()
                if stripped:
                    try:
                        event = json.loads(stripped.decode("utf-8"))
                    except (UnicodeDecodeError, json.JSONDecodeError):
                        break
                    self._apply(event)
                    self._sequence = event["sequence"]
                good += len(raw)
                terminated = raw.endswith(b"\n")
            else:
                if terminated:
                    return
                with open(self._log_path, "ab") as tail:
                    tail.write(b"\n")
                return
        with open(self._log_path, "rb+") as tail:
            tail.truncate(good)

    def _emit(self, kind: str, payload: dict) -> dict:
        self._sequence += 1
        event = {
            "sequence": self._sequence,
            "kind": kind,
            "timestamp": self._clock(),
            "payload": payload,
        }
        self._log_file.write(json.dumps(event, separators=(",", ":")) + "\n")
        self._log_file.flush()
        self._apply(event)
        return event

    def _apply(self, event: dict) -> None:
        payload = event["payload"]
        kind = event["kind"]
        if kind == "policy_ingested":
            statements = payload["statements"]
            self._policies[payload["policy_id"]] = _Policy(
                policy_id=payload["policy_id"],
                source_url=payload["source_url"],
                statements=statements,
                text_of={s["statement_id"]: s["text"] for s in statements},
            )
        elif kind == "hits_generated":
            policy = self._policies[payload["policy_id"]]
            policy.hits_generated = True
            for h in payload["hits"]:
                pair = (h["a"], h["b"])
                hit = _ServiceHit(
                    hit_id=h["hit_id"],
                    policy_id=policy.policy_id,
                    a=h["a"],
                    b=h["b"],
                    presentation=h["presentation"],
                    slot=h["slot"],
                )
                self._hits[hit.hit_id] = hit
                policy.hit_ids.append(hit.hit_id)
                if pair not in self._pairs:
                    self._pairs[pair] = _PairState(policy_id=policy.policy_id)
                    policy.pair_tuples.append(pair)
                self._pairs[pair].hit_ids.append(hit.hit_id)
                self._open_counts[pair] = self._open_counts.get(pair, 0) + 1
        elif kind == "worker_registered":
            self._workers[payload["worker_id"]] = _Worker(
                worker_id=payload["worker_id"],
                qualified=payload["qualified"],
            )
            self._worker_count += 1
        elif kind == "hit_assigned":
            hit = self._hits[payload["hit_id"]]
            pair = (hit.a, hit.b)
            hit.status = "assigned"
            hit.worker_id = payload["worker_id"]
            hit.expires_at = payload["expires_at"]
            self._leases[hit.hit_id] = payload["expires_at"]
            self._workers[payload["worker_id"]].active[hit.hit_id] = pair
            self._dec_open(pair)
        elif kind == "vote_recorded":
            hit = self._hits[payload["hit_id"]]
            pair = (hit.a, hit.b)
            worker = self._workers[payload["worker_id"]]
            hit.status = "completed"
            hit.expires_at = None
            self._leases.pop(hit.hit_id, None)
            worker.active.pop(hit.hit_id, None)
            worker.completed_pairs.add(pair)
            worker.votes_cast += 1
            self._pairs[pair].votes.append({
                "hit_id": payload["hit_id"],
                "worker_id": payload["worker_id"],
                "choice": payload["choice"],
                "canonical_score": payload["canonical_score"],
                "timestamp": payload["timestamp"],
            })
        elif kind == "assignment_expired":
            hit = self._hits[payload["hit_id"]]
            pair = (hit.a, hit.b)
            worker = self._workers[payload["worker_id"]]
            hit.status = "open"
            hit.worker_id = None
            hit.expires_at = None
            self._leases.pop(hit.hit_id, None)
            worker.active.pop(hit.hit_id, None)
            self._open_counts[pair] = self._open_counts.get(pair, 0) + 1
        else:
            raise InvalidInput(f"unknown event kind {kind!r} in log")

    def _dec_open(self, pair: tuple[str, str]) -> None:
        remaining = self._open_counts.get(pair, 0) - 1
        if remaining > 0:
            self._open_counts[pair] = remaining
        else:
            self._open_counts.pop(pair, None)

    def close(self) -> None:
        with self._lock:
            self._log_file.close()

    # ------------------------------------------------------------------
    # lease expiry

    def _reap(self, now: float) -> list[str]:
        expired = [
            hit_id
            for hit_id, expires_at in sorted(self._leases.items())
            if expires_at <= now
        ]
        for hit_id in expired:
            hit = self._hits[hit_id]
            self._emit("assignment_expired", {
                "hit_id": hit_id,
                "worker_id": hit.worker_id,
            })
        return expired

    def expire_overdue(self) -> list[str]:
        """Return expired assignments to the open pool."""
        with self._lock:
            return self._reap(self._clock())

    # ------------------------------------------------------------------
    # commands

    def ingest_policy(
        self,
        raw_text: str,
        policy_id: str | None = None,
        source_url: str = "",
    ) -> dict:
        with self._lock:
            if policy_id is None:
                policy_id = f"p{len(self._policies) + 1:04d}"
            if policy_id in self._policies:
                raise InvalidInput(f"policy {policy_id!r} already ingested")
            doc = segment_policy(policy_id, source_url, raw_text)
            self._emit("policy_ingested", {
                "policy_id": policy_id,
                "source_url": source_url,
                "statements": [
                    {
                        "statement_id": s.statement_id,
                        "index": s.index,
                        "text": s.text,
                        "word_count": s.word_count,
                    }
                    for s in doc.statements
                ],
            })
            return {"policy_id": policy_id, "statements": len(doc.statements)}

    def generate_policy_hits(
        self,
        policy_id: str,
        fraction: float = 1.0,
        seed: int | None = None,
    ) -> dict:
        with self._lock:
            policy = self._policy(policy_id)
            if policy.hits_generated:
                raise InvalidInput(f"hits already generated for {policy_id!r}")
            if not 0.0 < fraction <= 1.0:
                raise InvalidInput(f"fraction must be in (0, 1], got {fraction}")
            doc = self._as_document(policy)
            pairs = enumerate_pairs(doc)
            hits = generate_hits(pairs, fraction=fraction, seed=seed)
            self._emit("hits_generated", {
                "policy_id": policy_id,
                "fraction": fraction,
                "seed": seed,
                "hits": [
                    {
                        "hit_id": h.hit_id,
                        "a": h.pair.a,
                        "b": h.pair.b,
                        "presentation": h.presentation,
                        "slot": h.slot,
                    }
                    for h in hits
                ],
            })
            return {
                "policy_id": policy_id,
                "pairs": len(hits) // VOTES_PER_PAIR,
                "hits": len(hits),
            }

    def register_worker(
        self, worker_id: str | None = None, qualified: bool = True
    ) -> dict:
        with self._lock:
            if worker_id is None:
                worker_id = f"w{self._worker_count + 1:04d}"
            if worker_id in self._workers:
                raise InvalidInput(f"worker {worker_id!r} already registered")
            self._emit("worker_registered", {
                "worker_id": worker_id,
                "qualified": qualified,
            })
            return {"worker_id": worker_id, "qualified": qualified}

    def assign_task(self, worker_id: str, policy_id: str | None = None) -> dict:
        """Pick an open hit uniformly at random among pairs the worker has
        neither voted on nor currently holds, preferring the presentation
        with fewer completed+assigned votes within the chosen pair.

        Workers draw from a single pool spanning every policy; pass
        `policy_id` to restrict the draw to one policy's open hits.
        Unqualified workers receive no tasks.
        """
        with self._lock:
            now = self._clock()
            self._reap(now)
            worker = self._worker(worker_id)
            if not worker.qualified:
                raise NoTaskAvailable(f"worker {worker_id!r} is not qualified")
            held = set(worker.active.values())
            eligible: list[tuple[tuple[str, str], int]] = [
                (pair, count)
                for pair, count in self._open_counts.items()
                if pair not in worker.completed_pairs
                and pair not in held
                and (policy_id is None or self._pairs[pair].policy_id == policy_id)
            ]
            if not eligible:
                raise NoTaskAvailable(f"no open task for worker {worker_id!r}")
            total = sum(count for _, count in eligible)
            pick = self._rng.randrange(total)
            for pair, count in eligible:
                if pick < count:
                    break
                pick -= count
            hit = self._pick_slot(pair)
            expires_at = now + self.lease_seconds
            self._emit("hit_assigned", {
                "hit_id": hit.hit_id,
                "worker_id": worker_id,
                "expires_at": expires_at,
            })
            policy = self._policies[hit.policy_id]
            first_id = hit.a if hit.presentation == "AB" else hit.b
            second_id = hit.b if hit.presentation == "AB" else hit.a
            return {
                "hit_id": hit.hit_id,
                "policy_id": hit.policy_id,
                "presentation": hit.presentation,
                "statement_1_id": first_id,
                "statement_1": policy.text_of[first_id],
                "statement_2_id": second_id,
                "statement_2": policy.text_of[second_id],
                "source_url": policy.source_url,
                "expires_at": expires_at,
            }

    def _pick_slot(self, pair: tuple[str, str]) -> _ServiceHit:
        """Among the pair's open slots, prefer the presentation with fewer
        completed+assigned votes; break remaining ties by slot number."""
        hits = [self._hits[hid] for hid in self._pairs[pair].hit_ids]
        open_slots = sorted(
            (h for h in hits if h.status == "open"), key=lambda h: h.slot
        )
        taken = {"AB": 0, "BA": 0}
        for h in hits:
            if h.status != "open":
                taken[h.presentation] += 1
        if taken["AB"] != taken["BA"]:
            prefer = "AB" if taken["AB"] < taken["BA"] else "BA"
            preferred = [h for h in open_slots if h.presentation == prefer]
            if preferred:
                return preferred[0]
        return open_slots[0]

    def submit_vote(self, worker_id: str, hit_id: str, choice: str) -> dict:
        with self._lock:
            now = self._clock()
            self._reap(now)
            if choice not in CHOICES:
                raise InvalidChoice(f"choice must be one of {CHOICES}, got {choice!r}")
            worker = self._worker(worker_id)
            hit = self._hits.get(hit_id)
            if hit is None:
                raise StaleAssignment(f"unknown hit {hit_id!r}")
            pair = (hit.a, hit.b)
            if hit.status == "completed":
                previous = next(
                    (v for v in self._pairs[pair].votes if v["hit_id"] == hit_id),
                    None,
                )
                if previous and previous["worker_id"] == worker_id:
                    if previous["choice"] == choice:
                        return self._vote_ack(pair, hit_id, duplicate=True)
                    raise ConflictingResubmission(
                        f"hit {hit_id!r} already voted {previous['choice']!r}"
                    )
                raise StaleAssignment(f"hit {hit_id!r} was completed by another worker")
            if hit.status != "assigned" or hit.worker_id != worker_id:
                raise StaleAssignment(
                    f"hit {hit_id!r} is not currently assigned to {worker_id!r}"
                )
            vote = canonicalize_vote(
                Hit(
                    hit_id=hit.hit_id,
                    pair=PairKey(hit.a, hit.b),
                    presentation=hit.presentation,
                    slot=hit.slot,
                    status="assigned",
                    worker_id=worker_id,
                ),
                choice,
                timestamp=now,
            )
            self._emit("vote_recorded", {
                "hit_id": hit_id,
                "worker_id": worker_id,
                "choice": choice,
                "canonical_score": vote.canonical_score,
                "timestamp": now,
            })
            return self._vote_ack(pair, hit_id, duplicate=False)

    def _vote_ack(self, pair: tuple[str, str], hit_id: str, duplicate: bool) -> dict:
        votes = self._pairs[pair].votes
        return {
            "status": "recorded",
            "hit_id": hit_id,
            "duplicate": duplicate,
            "votes_for_pair": len(votes),
            "pair_complete": len(votes) == VOTES_PER_PAIR,
        }

    # ------------------------------------------------------------------
    # queries

    def policy_status(self, policy_id: str) -> dict:
        with self._lock:
            policy = self._policy(policy_id)
            counts = {"open": 0, "assigned": 0, "completed": 0}
            for hit_id in policy.hit_ids:
                counts[self._hits[hit_id].status] += 1
            fully_voted = sum(
                1
                for pair in policy.pair_tuples
                if len(self._pairs[pair].votes) == VOTES_PER_PAIR
            )
            return {
                "policy_id": policy_id,
                "total_hits": len(policy.hit_ids),
                "completed": counts["completed"],
                "open": counts["open"],
                "assigned": counts["assigned"],
                "pairs_fully_voted": fully_voted,
            }

    def list_policies(self) -> list[dict]:
        with self._lock:
            return [
                {
                    "policy_id": p.policy_id,
                    "source_url": p.source_url,
                    "statements": len(p.statements),
                    "hits_generated": p.hits_generated,
                }
                for p in self._policies.values()
            ]

    def policy_statements(self, policy_id: str) -> list[dict]:
        with self._lock:
            return [dict(s) for s in self._policy(policy_id).statements]

    def get_comparisons(self, policy_id: str) -> list[AggregatedComparison]:
        """Aggregated outcomes of every fully-voted pair, in pair order."""
        with self._lock:
            policy = self._policy(policy_id)
            comparisons = []
            for pair in sorted(policy.pair_tuples):
                state = self._pairs[pair]
                if len(state.votes) != VOTES_PER_PAIR:
                    continue
                votes = [
                    Vote(
                        hit_id=v["hit_id"],
                        worker_id=v["worker_id"],
                        choice=v["choice"],
                        canonical_score=v["canonical_score"],
                        pair=PairKey(pair[0], pair[1]),
                        timestamp=v["timestamp"],
                    )
                    for v in state.votes
                ]
                comparisons.append(aggregate_pair(votes))
            return comparisons

    def get_ranking(
        self,
        policy_id: str,
        alpha: float = 0.01,
        tolerance: float = 1e-8,
        max_iterations: int = 10_000,
    ) -> dict:
        with self._lock:
            policy = self._policy(policy_id)
            comparisons = self.get_comparisons(policy_id)
            tuples = extract_win_tuples(comparisons)
            if not tuples:
                raise NoData(f"policy {policy_id!r} has no decided comparisons")
            model = fit_bradley_terry(
                tuples,
                alpha=alpha,
                tolerance=tolerance,
                max_iterations=max_iterations,
                statements=[s["statement_id"] for s in policy.statements],
                policy_id=policy_id,
            )
            ranking = rank_from_model(model)
            return {
                "policy_id": policy_id,
                "converged": model.converged,
                "iterations": model.iterations,
                "regularization": model.regularization,
                "uncompared": sorted(model.uncompared),
                "ranking": [
                    {
                        "rank": ranking.rank_of[s],
                        "statement_id": s,
                        "theta": model.abilities[s],
                        "text": policy.text_of[s],
                    }
                    for s in ranking.ordered
                ],
            }

    # ------------------------------------------------------------------
    # simulation

    def simulate_workers(
        self,
        policy_id: str,
        worker_count: int = 6,
        noise: float = 0.0,
        planted: dict[str, float] | None = None,
        seed: int | None = None,
        tie_probability: float = 0.0,
    ) -> dict:
        """Synthetic workers drain the policy's open tasks.

        Each vote picks the statement the planted model favors (higher
        planted log-ability wins; exact ties flip a coin), inverted with
        probability `noise`, or "equal" with probability
        `tie_probability`. Deterministic given seed when the service rng
        is also seeded. Other policies' hits are left untouched.
        """
        with self._lock:
            self._policy(policy_id)
            if worker_count < VOTES_PER_PAIR:
                raise InsufficientWorkers(
                    f"need >= {VOTES_PER_PAIR} workers, got {worker_count}"
                )
            if not self._policies[policy_id].hits_generated:
                raise NoData(f"policy {policy_id!r} has no hits generated")
            rng = random.Random(seed)
            planted = planted or {}
            salt = self._sequence
            workers = [
                self.register_worker(f"sim-{policy_id}-{salt}-w{i:03d}")["worker_id"]
                for i in range(worker_count)
            ]
            votes_cast = 0
            exhausted: set[str] = set()
            while len(exhausted) < len(workers):
                for worker_id in workers:
                    if worker_id in exhausted:
                        continue
                    try:
                        task = self.assign_task(worker_id, policy_id=policy_id)
                    except NoTaskAvailable:
                        exhausted.add(worker_id)
                        continue
                    choice = self._simulated_choice(task, planted, noise, tie_probability, rng)
                    self.submit_vote(worker_id, task["hit_id"], choice)
                    votes_cast += 1
            status = self.policy_status(policy_id)
            return {
                "policy_id": policy_id,
                "workers": workers,
                "votes_cast": votes_cast,
                "pairs_fully_voted": status["pairs_fully_voted"],
                "completed": status["completed"],
            }

    @staticmethod
    def _simulated_choice(
        task: dict,
        planted: dict[str, float],
        noise: float,
        tie_probability: float,
        rng: random.Random,
    ) -> str:
        if tie_probability > 0 and rng.random() < tie_probability:
            return "equal"
        theta_1 = planted.get(task["statement_1_id"], 0.0)
        theta_2 = planted.get(task["statement_2_id"], 0.0)
        if theta_1 == theta_2:
            first_wins = rng.random() < 0.5
        else:
            first_wins = theta_1 > theta_2
        if noise > 0 and rng.random() < noise:
            first_wins = not first_wins
        return "first" if first_wins else "second"

    # ------------------------------------------------------------------
    # audits (used by invariant tests and the soak harness)

    def audit_pairs(self) -> Iterator[dict]:
        """Per-pair slot bookkeeping snapshot."""
        with self._lock:
            for pair, state in self._pairs.items():
                hits = [self._hits[hid] for hid in state.hit_ids]
                yield {
                    "pair": pair,
                    "policy_id": state.policy_id,
                    "open": sum(1 for h in hits if h.status == "open"),
                    "assigned": sum(1 for h in hits if h.status == "assigned"),
                    "completed": sum(1 for h in hits if h.status == "completed"),
                    "taken_AB": sum(
                        1 for h in hits if h.presentation == "AB" and h.status != "open"
                    ),
                    "taken_BA": sum(
                        1 for h in hits if h.presentation == "BA" and h.status != "open"
                    ),
                    "vote_workers": [v["worker_id"] for v in state.votes],
                }

    # ------------------------------------------------------------------
    # helpers

    def _policy(self, policy_id: str) -> _Policy:
        policy = self._policies.get(policy_id)
        if policy is None:
            raise UnknownPolicy(f"unknown policy {policy_id!r}")
        return policy

    def _worker(self, worker_id: str) -> _Worker:
        worker = self._workers.get(worker_id)
        if worker is None:
            raise UnknownWorker(f"unknown worker {worker_id!r}")
        return worker

    @staticmethod
    def _as_document(policy: _Policy) -> PolicyDocument:
        return PolicyDocument(
            policy_id=policy.policy_id,
            source_url=policy.source_url,
            raw_text=" ".join(s["text"] for s in policy.statements),
            statements=[
                Statement(
                    statement_id=s["statement_id"],
                    policy_id=policy.policy_id,
                    index=s["index"],
                    text=s["text"],
                    word_count=s["word_count"],
                )
                for s in policy.statements
            ],
        )

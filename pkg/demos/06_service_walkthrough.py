"""
The task service, end to end
============================

The service hands out one pairwise comparison at a time, balances the
two presentation orders, enforces one vote per worker per pair, and
persists everything as an append-only event log. Killing the process
and replaying the log reproduces the exact state.

The same service backs the HTTP app (`termrank serve`); here it is
driven in-process.
"""

import random
import tempfile
from pathlib import Path

from termrank.service import TaskService
from termrank.synthetic import planted_policy

data_dir = Path(tempfile.mkdtemp()) / "walkthrough"
service = TaskService(data_dir, rng=random.Random(0))

doc, planted = planted_policy(6, seed=4, spread=3.0)
service.ingest_policy(doc.raw_text, policy_id="demo", source_url=doc.source_url)
info = service.generate_policy_hits("demo")
print(f"ingested demo: {info['pairs']} pairs, {info['hits']} tasks")

workers = [service.register_worker()["worker_id"] for _ in range(6)]
print(f"registered workers: {', '.join(workers)}")

# one worker's view: fetch a task, vote, repeat
worker = workers[0]
task = service.assign_task(worker)
print(
    f"\n{worker} sees ({task['presentation']}):\n"
    f"  1) {task['statement_1']}\n"
    f"  2) {task['statement_2']}"
)
ack = service.submit_vote(worker, task["hit_id"], "first")
print(f"vote recorded, {ack['votes_for_pair']}/6 votes for this pair")

# resubmitting the same choice is an idempotent no-op
again = service.submit_vote(worker, task["hit_id"], "first")
print(f"resubmit: duplicate={again['duplicate']}")

# a simulated crowd drains the rest; noise flips some judgments
out = service.simulate_workers(
    "demo", worker_count=6, noise=0.1, planted=planted, seed=4
)
status = service.policy_status("demo")
print(
    f"\ncrowd cast {out['votes_cast']} more votes; "
    f"{status['pairs_fully_voted']}/{info['pairs']} pairs fully voted"
)

result = service.get_ranking("demo", alpha=0.1)
print("\nfitted ranking:")
for row in result["ranking"]:
    print(f"  #{row['rank']}  {row['statement_id']}  theta={row['theta']:+.2f}")

# replay: a fresh process pointed at the same log sees identical state
reborn = TaskService(data_dir)
same = reborn.policy_status("demo") == status
print(f"\nreplayed {data_dir.name}/events.jsonl -> state identical: {same}")

"""
From aggregated votes to a ranking
==================================

Six votes per pair are collapsed into one aggregated comparison (sum of
canonical scores decides the winner, ties drop the pair), the decided
pairs feed the paired-comparison model, and the fitted log-abilities
order the statements.
"""

import numpy as np

from termrank import (
    extract_win_tuples,
    fit_bradley_terry,
    rank_from_model,
    win_probability,
)
from termrank.synthetic import planted_policy, sample_comparisons_from_abilities

doc, planted = planted_policy(10, seed=7, spread=2.0)
print("planted strengths (log scale):")
for sid, theta in sorted(planted.items(), key=lambda kv: -kv[1]):
    print(f"  {sid}  {theta:+.2f}")

comparisons = sample_comparisons_from_abilities(planted, seed=7)
decided = [c for c in comparisons if c.outcome != "Dropped"]
print(f"\n{len(comparisons)} pairs voted, {len(decided)} decided")

tuples = extract_win_tuples(decided)
# alpha adds a whisper of pseudo-wins; without it an undefeated
# statement has no finite maximum-likelihood ability
model = fit_bradley_terry(tuples, alpha=0.1, track_loglik=True)
print(
    f"fit converged={model.converged} after {model.iterations} iterations; "
    f"log-likelihood rose by {model.loglik_trace[-1] - model.loglik_trace[0]:.2f}"
)

ranking = rank_from_model(model)
planted_order = sorted(planted, key=planted.get, reverse=True)
print("\nrank  statement   theta    planted rank")
for pos, sid in enumerate(ranking.ordered, start=1):
    print(
        f"  {pos:>2}  {sid}  {model.abilities[sid]:+.3f}   "
        f"{planted_order.index(sid) + 1}"
    )

top, bottom = ranking.ordered[0], ranking.ordered[-1]
p = win_probability(model, top, bottom)
print(f"\nP({top} beats {bottom}) = {p:.3f}")

agreements = np.array([c.percent_agreement for c in decided])
print(f"mean per-pair agreement: {agreements.mean():.2f}")

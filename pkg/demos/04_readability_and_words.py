"""
What makes a statement feel important?
======================================

Two descriptive analyses over a ranked policy: does readability track
perceived importance, and which words are over-represented in the
statements people rank highest?
"""

from termrank import (
    extract_win_tuples,
    fit_bradley_terry,
    rank_from_model,
)
from termrank.classifier.preprocess import preprocess
from termrank.synthetic import planted_policy, sample_comparisons_from_abilities
from termrank.textstats import (
    chi_square_words,
    flesch_bucket,
    flesch_score,
    readability_vs_rank,
)

doc, planted = planted_policy(12, seed=2, spread=3.0)
comparisons = sample_comparisons_from_abilities(planted, seed=2)
decided = [c for c in comparisons if c.outcome != "Dropped"]
model = fit_bradley_terry(extract_win_tuples(decided), alpha=0.1)
ranking = rank_from_model(model)

print("rank  flesch  bucket      statement")
scores = {}
for pos, sid in enumerate(ranking.ordered, start=1):
    text = next(s.text for s in doc.statements if s.statement_id == sid)
    score = flesch_score(text, statement_id=sid)
    scores[sid] = score.flesch
    print(
        f"  {pos:>2}  {score.flesch:6.1f}  {flesch_bucket(score.flesch):<14}"
        f"  {text[:60]}"
    )

tau = readability_vs_rank(scores, [ranking])
print(
    f"\nreadability vs rank: tau={tau['tau']:+.3f} (p={tau['p_value']:.3f}) "
    "- near zero means ease of reading does not drive importance here"
)

tokens = [preprocess(s.text) for s in doc.statements]
important = [ranking.relative_rank[s.statement_id] <= 0.25 for s in doc.statements]
print("\nwords most associated with the top quarter of the ranking:")
for row in chi_square_words(tokens, important, top_k=5):
    print(f"  {row.word:<12} chi2={row.chi2:5.2f}  ({row.a} of {row.a + row.c} "
          "important statements contain it)")

"""
Predicting importance for unseen policies
=========================================

Once enough policies are ranked by the crowd, a classifier can guess
which statements of a brand-new policy would land in the top band:
statements become tf-idf-weighted mean embeddings, a support vector
machine separates top-band from bottom-band examples, and the grid
search picks its kernel by balanced accuracy.
"""

from termrank.classifier.experiment import (
    BAND_BOTTOM,
    BAND_TOP,
    LABEL_IMPORTANT,
    LABEL_UNIMPORTANT,
    LabeledStatement,
    bin_labels,
    run_experiment,
    train_svm,
)
from termrank.classifier.features import (
    build_tfidf,
    fallback_embeddings,
    featurize,
)
from termrank.synthetic import keyword_pool_corpus

records, rankings = keyword_pool_corpus(n_policies=8, statements_per_policy=18, seed=0)
embeddings = fallback_embeddings(seed=0, dimension=50)
print(f"{len(records)} statements across {len(rankings)} ranked policies")

results = run_experiment(
    records,
    rankings,
    embeddings,
    T_values=[15, 25],
    bootstraps=4,
    seed=0,
)
print("\nT (top %)  balanced acc  recall  precision  modal grid choice")
for T, report in sorted(results.items()):
    modal = report["modal_choice"]
    gamma = "-" if modal.gamma is None else f"{modal.gamma:g}"
    print(
        f"  {T:>4}       {report['balanced_accuracy']:.3f}       "
        f"{report['recall']:.3f}   {report['precision']:.3f}     "
        f"{modal.kernel} C={modal.C:g} gamma={gamma}"
    )

# refit on everything at T=15 with the winning grid point and predict a
# held-back policy's statements
T = 15
modal = results[T]["modal_choice"]
tfidf = build_tfidf([r.tokens for r in records])
holdout = sorted(rankings)[-1]
rows = []
for policy_id, ranking in rankings.items():
    if policy_id == holdout:
        continue
    bands = bin_labels(ranking, T)
    for record in records:
        band = bands.get(record.statement_id)
        if record.policy_id != policy_id or band not in (BAND_TOP, BAND_BOTTOM):
            continue
        rows.append(LabeledStatement(
            statement_id=record.statement_id,
            feature=featurize(record.tokens, tfidf, embeddings).values,
            label=LABEL_IMPORTANT if band == BAND_TOP else LABEL_UNIMPORTANT,
            band=band,
        ))
model = train_svm(rows, kernel=modal.kernel, C=modal.C, gamma=modal.gamma, seed=0)

bands = bin_labels(rankings[holdout], T)
print(f"\npredictions for held-out policy {holdout} (true band in brackets):")
for record in records:
    band = bands.get(record.statement_id)
    if record.policy_id != holdout or band not in (BAND_TOP, BAND_BOTTOM):
        continue
    feature = featurize(record.tokens, tfidf, embeddings).values
    guess = model.predict(feature.reshape(1, -1))[0]  # +1 important, -1 not
    label = LABEL_IMPORTANT if guess > 0 else LABEL_UNIMPORTANT
    print(f"  {record.statement_id}  {label:<12} [{band}]")

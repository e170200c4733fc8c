import random

import numpy as np
import pytest

from termrank.btrank import Ranking
from termrank.classifier.experiment import (
    BAND_BOTTOM,
    BAND_MIDDLE,
    BAND_TOP,
    DEFAULT_GRID,
    LABEL_IMPORTANT,
    LABEL_UNIMPORTANT,
    GridPoint,
    LabeledStatement,
    _stratified_split,
    bin_labels,
    evaluate,
    grid_search,
    run_experiment,
    train_svm,
)
from termrank.classifier.features import fallback_embeddings
from termrank.errors import (
    InsufficientData,
    InvalidInput,
    InvalidThreshold,
    UnknownPolicy,
)
from termrank.synthetic import keyword_pool_corpus


def ranking_of(n, policy_id="p"):
    ids = [f"{policy_id}-s{i:03d}" for i in range(n)]
    return Ranking(
        policy_id=policy_id,
        ordered=ids,
        rank_of={s: i + 1 for i, s in enumerate(ids)},
        relative_rank={s: (i + 1) / n for i, s in enumerate(ids)},
    )


class TestBinLabels:
    def test_44_statements_at_15_percent(self):
        bands = bin_labels(ranking_of(44), T=15)
        counts = {b: sum(1 for v in bands.values() if v == b) for b in set(bands.values())}
        assert counts == {BAND_TOP: 6, BAND_MIDDLE: 16, BAND_BOTTOM: 22}

    def test_50_percent_leaves_no_middle(self):
        bands = bin_labels(ranking_of(44), T=50)
        counts = {b: sum(1 for v in bands.values() if v == b) for b in set(bands.values())}
        assert counts == {BAND_TOP: 22, BAND_BOTTOM: 22}

    def test_tiny_policy_floor(self):
        bands = bin_labels(ranking_of(3), T=5)
        assert bands["p-s000"] == BAND_TOP  # floor would give 0; floor is 1
        assert bands["p-s002"] == BAND_BOTTOM
        assert bands["p-s001"] == BAND_MIDDLE

    def test_band_positions_follow_rank_order(self):
        ranking = ranking_of(10)
        bands = bin_labels(ranking, T=20)
        assert [bands[s] for s in ranking.ordered] == (
            [BAND_TOP] * 2 + [BAND_MIDDLE] * 3 + [BAND_BOTTOM] * 5
        )

    @pytest.mark.parametrize("bad", [0, -5, 50.5, 100])
    def test_threshold_validation(self, bad):
        with pytest.raises(InvalidThreshold):
            bin_labels(ranking_of(10), T=bad)


def separable_rows(n_per_class=10, dim=2, gap=4.0, seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    for k in range(n_per_class):
        rows.append(LabeledStatement(
            statement_id=f"imp{k}",
            feature=rng.normal(gap / 2, 0.3, dim),
            label=LABEL_IMPORTANT,
            band=BAND_TOP,
        ))
        rows.append(LabeledStatement(
            statement_id=f"unimp{k}",
            feature=rng.normal(-gap / 2, 0.3, dim),
            label=LABEL_UNIMPORTANT,
            band=BAND_BOTTOM,
        ))
    return rows


class TestGridSearch:
    def test_single_point_grid(self):
        rows = separable_rows()
        out = grid_search(rows, grid=[GridPoint("linear", 7.0)], seed=0)
        assert out.best == GridPoint("linear", 7.0)
        assert len(out.table) == 1

    def test_tie_break_prefers_small_c_then_linear(self):
        rows = separable_rows()
        grid = [
            GridPoint("rbf", 10.0, 0.1),
            GridPoint("rbf", 1.0, 0.1),
            GridPoint("linear", 10.0),
            GridPoint("linear", 1.0),
        ]
        out = grid_search(rows, grid=grid, seed=0)
        # all four separate perfectly; ties resolve to C=1, then linear
        assert all(e["cv_balanced_accuracy"] == 1.0 for e in out.table)
        assert out.best == GridPoint("linear", 1.0)
        assert out.cv_balanced_accuracy == 1.0

    def test_deterministic_given_seed(self):
        rows = separable_rows()
        grid = [GridPoint("linear", 1.0), GridPoint("rbf", 1.0, 0.01)]
        a = grid_search(rows, grid=grid, seed=3)
        b = grid_search(rows, grid=grid, seed=3)
        assert a.best == b.best
        assert a.table == b.table

    def test_needs_enough_rows_per_class(self):
        rows = separable_rows(n_per_class=3)
        with pytest.raises(InsufficientData):
            grid_search(rows, grid=[GridPoint("linear", 1.0)], folds=5, seed=0)

    def test_empty_grid(self):
        with pytest.raises(InvalidInput):
            grid_search(separable_rows(), grid=[], seed=0)

    def test_default_grid_shape(self):
        assert len(DEFAULT_GRID) == 25
        linears = [p for p in DEFAULT_GRID if p.kernel == "linear"]
        rbfs = [p for p in DEFAULT_GRID if p.kernel == "rbf"]
        assert len(linears) == 5 and len(rbfs) == 20
        assert all(p.gamma is None for p in linears)


class _FixedPredictor:
    def __init__(self, pred):
        self.pred = np.asarray(pred)

    def predict(self, X):
        return self.pred


class TestEvaluate:
    def test_confusion_and_derived_metrics(self):
        rows = []
        pred = []
        # 10 important: 9 hits, 1 miss; 40 unimportant: 36 hits, 4 misses
        for k in range(10):
            rows.append(LabeledStatement(f"i{k}", np.zeros(2), LABEL_IMPORTANT, BAND_TOP))
            pred.append(1 if k < 9 else -1)
        for k in range(40):
            rows.append(LabeledStatement(f"u{k}", np.zeros(2), LABEL_UNIMPORTANT, BAND_BOTTOM))
            pred.append(1 if k < 4 else -1)
        texts = {r.statement_id: f"text of {r.statement_id}" for r in rows}
        m = evaluate(_FixedPredictor(pred), rows, texts)
        assert (m.tp, m.fn, m.tn, m.fp) == (9, 1, 36, 4)
        assert m.recall == pytest.approx(0.9)
        assert m.precision == pytest.approx(9 / 13)
        assert m.balanced_accuracy == pytest.approx(0.9)
        assert m.error_listing["false_negatives"] == ["text of i9"]
        assert m.error_listing["false_positives"] == [f"text of u{k}" for k in range(4)]

    def test_ids_fall_back_when_texts_missing(self):
        rows = [
            LabeledStatement("a", np.zeros(2), LABEL_IMPORTANT, BAND_TOP),
            LabeledStatement("b", np.zeros(2), LABEL_UNIMPORTANT, BAND_BOTTOM),
        ]
        m = evaluate(_FixedPredictor([-1, 1]), rows)
        assert m.error_listing == {"false_positives": ["b"], "false_negatives": ["a"]}

    def test_empty_rows(self):
        with pytest.raises(InvalidInput):
            evaluate(_FixedPredictor([]), [])


class TestStratifiedSplit:
    def test_ratio_and_stratification(self):
        rows = separable_rows(n_per_class=10)
        train, val = _stratified_split(rows, random.Random(0))
        assert len(train) == 16 and len(val) == 4
        for part, count in ((train, 8), (val, 2)):
            assert sum(1 for r in part if r.label == LABEL_IMPORTANT) == count
        assert {r.statement_id for r in train} | {r.statement_id for r in val} == {
            r.statement_id for r in rows
        }

    def test_every_class_keeps_a_validation_row(self):
        rows = separable_rows(n_per_class=2)  # 20% of 2 rounds to 0
        _, val = _stratified_split(rows, random.Random(0))
        assert {r.label for r in val} == {LABEL_IMPORTANT, LABEL_UNIMPORTANT}


class TestTrainSvm:
    def test_labels_map_to_signs(self):
        rows = separable_rows()
        model = train_svm(rows, kernel="linear", C=1.0)
        important = np.array([r.feature for r in rows if r.label == LABEL_IMPORTANT])
        assert (model.predict(important) == 1).all()

    def test_empty(self):
        with pytest.raises(InvalidInput):
            train_svm([])


SMALL_GRID = (GridPoint("linear", 1.0), GridPoint("rbf", 1.0, 0.01))


class TestRunExperiment:
    def make_corpus(self):
        records, rankings = keyword_pool_corpus(
            n_policies=6, statements_per_policy=12, seed=0
        )
        return records, rankings, fallback_embeddings(seed=0, dimension=25)

    def test_shape_and_determinism(self):
        records, rankings, emb = self.make_corpus()
        kwargs = dict(
            T_values=[15], bootstraps=2, seed=0, grid=SMALL_GRID, folds=3
        )
        first = run_experiment(records, rankings, emb, **kwargs)
        second = run_experiment(records, rankings, emb, **kwargs)
        assert set(first) == {15}
        cell = first[15]
        assert len(cell["per_bootstrap"]) == 2
        assert len(cell["chosen"]) == 2
        assert cell["modal_choice"] in SMALL_GRID
        assert 0.0 <= cell["balanced_accuracy"] <= 1.0
        assert cell["balanced_accuracy"] == second[15]["balanced_accuracy"]
        assert cell["chosen"] == second[15]["chosen"]

    def test_validation(self):
        records, rankings, emb = self.make_corpus()
        single = [r for r in records if r.policy_id == records[0].policy_id]
        with pytest.raises(InvalidInput):
            run_experiment(single, rankings, emb, T_values=[15], seed=0)
        missing = {k: v for k, v in rankings.items() if k != records[0].policy_id}
        with pytest.raises(UnknownPolicy):
            run_experiment(records, missing, emb, T_values=[15], seed=0)

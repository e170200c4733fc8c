import itertools
import math
import random

import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import kendall_oracle
from termrank.btrank import Ranking
from termrank.errors import InvalidInput, NoData
from termrank.pairing import AggregatedComparison, PairKey
from termrank.sampling import (
    DEFAULT_FRACTIONS,
    association_strength,
    kendall_tau,
    run_scalability_experiment,
    sample_comparisons,
    similarity_coefficient,
)
from termrank.synthetic import planted_policy, sample_comparisons_from_abilities


class TestKendallTau:
    def test_worked_example(self):
        # one discordant pair out of six
        out = kendall_tau([1, 2, 3, 4], [1, 3, 2, 4])
        assert out["tau"] == pytest.approx(4 / 6, abs=1e-12)

    def test_identity_and_reversal(self):
        x = [3, 1, 4, 1.5, 5, 9, 2.6]
        assert kendall_tau(x, x)["tau"] == pytest.approx(1.0, abs=1e-12)
        assert kendall_tau(x, [-v for v in x])["tau"] == pytest.approx(-1.0, abs=1e-12)

    def test_constant_input_degenerate(self):
        assert kendall_tau([2, 2, 2], [1, 2, 3]) == {"tau": 0.0, "p_value": 1.0}

    def test_exhaustive_small_permutations(self):
        base = list(range(4))
        for perm in itertools.permutations(base):
            ours = kendall_tau(base, list(perm))
            ref = kendall_oracle(base, list(perm))
            assert ours["tau"] == pytest.approx(ref, abs=1e-12)

    def test_tied_vectors_match_oracle_and_scipy(self):
        rng = random.Random(42)
        for _ in range(60):
            n = rng.randrange(3, 12)
            x = [rng.randrange(4) for _ in range(n)]
            y = [rng.randrange(4) for _ in range(n)]
            ours = kendall_tau(x, y)
            assert ours["tau"] == pytest.approx(kendall_oracle(x, y), abs=1e-12)
            ref = scipy.stats.kendalltau(x, y, variant="b", method="asymptotic")
            if not math.isnan(ref.statistic):
                assert ours["tau"] == pytest.approx(ref.statistic, abs=1e-12)
                assert ours["p_value"] == pytest.approx(ref.pvalue, abs=1e-9)

    def test_input_validation(self):
        with pytest.raises(InvalidInput):
            kendall_tau([1, 2], [1, 2, 3])
        with pytest.raises(InvalidInput):
            kendall_tau([1], [1])

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(
            st.floats(allow_nan=False, allow_infinity=False, width=32),
            min_size=2,
            max_size=10,
        ),
        st.randoms(use_true_random=False),
    )
    def test_properties(self, x, rng):
        y = list(x)
        rng.shuffle(y)
        out = kendall_tau(x, y)
        assert -1.0 <= out["tau"] <= 1.0
        assert 0.0 <= out["p_value"] <= 1.0
        assert kendall_tau(y, x)["tau"] == pytest.approx(out["tau"], abs=1e-12)


class TestAssociationStrength:
    @pytest.mark.parametrize(
        "tau,label",
        [(0.36, "strong"), (-0.5, "strong"), (0.35, "medium"), (0.21, "medium"),
         (0.2, "weak"), (0.0, "weak")],
    )
    def test_thresholds(self, tau, label):
        assert association_strength(tau) == label


def comparisons_for(n_statements, seed):
    _, abilities = planted_policy(n_statements, seed=seed, spread=2.5)
    return sample_comparisons_from_abilities(abilities, seed=seed + 100)


class TestSampleComparisons:
    def test_count_and_coverage(self):
        comps = comparisons_for(12, seed=3)
        rng = random.Random(0)
        sub = sample_comparisons(comps, 0.5, rng)
        assert len(sub) == round(0.5 * len(comps))
        covered = {s for c in sub for s in (c.pair.a, c.pair.b)}
        full = {s for c in comps for s in (c.pair.a, c.pair.b)}
        assert covered == full

    def test_full_fraction_returns_all(self):
        comps = comparisons_for(8, seed=1)
        sub = sample_comparisons(comps, 1.0, seed=5)
        assert sorted(c.pair for c in sub) == sorted(c.pair for c in comps)

    def test_errors(self):
        comps = comparisons_for(8, seed=1)
        with pytest.raises(NoData):
            sample_comparisons([], 0.5)
        for bad in (0.0, -0.1, 1.5):
            with pytest.raises(InvalidInput):
                sample_comparisons(comps, bad)


def ranking_of(ordered):
    n = len(ordered)
    return Ranking(
        policy_id="p",
        ordered=list(ordered),
        rank_of={s: i + 1 for i, s in enumerate(ordered)},
        relative_rank={s: (i + 1) / n for i, s in enumerate(ordered)},
    )


class TestSimilarity:
    def test_top_set_size_is_ceiling(self):
        # 11 statements -> top set of ceil(2.2) = 3
        ids = [f"s{i}" for i in range(11)]
        full = ranking_of(ids)
        swapped = ids[:3][::-1] + ids[3:]
        assert similarity_coefficient(ranking_of(swapped), full) == 1.0

    def test_partial_and_disjoint_overlap(self):
        ids = [f"s{i}" for i in range(10)]
        full = ranking_of(ids)
        moved = ids[1:3] + [ids[0]] + ids[3:]  # top-2: {s1, s2} vs {s0, s1}
        assert similarity_coefficient(ranking_of(moved), full) == 0.5
        assert similarity_coefficient(ranking_of(ids[::-1]), full) == 0.0

    def test_mismatched_sets(self):
        with pytest.raises(InvalidInput):
            similarity_coefficient(ranking_of(["a", "b"]), ranking_of(["a", "c"]))


class TestScalabilityExperiment:
    def setup_method(self):
        self.comps = comparisons_for(12, seed=3)
        self.kwargs = dict(
            simulations=4,
            seed=0,
            policy_id="planted",
            fractions=(0.5, 1.0),
            alpha=0.1,
            tolerance=1e-5,
            max_iterations=2000,
        )

    def test_shape_and_full_fraction(self):
        reports, summary = run_scalability_experiment(self.comps, **self.kwargs)
        assert len(reports) == 4 * 2
        full_rows = [r for r in reports if r.fraction == 1.0]
        assert all(r.tau == 1.0 and r.similarity == 1.0 for r in full_rows)
        assert [r.seed for r in reports] == [0, 0, 1, 1, 2, 2, 3, 3]
        by_fraction = {row["fraction"]: row for row in summary}
        assert set(by_fraction) == {0.5, 1.0}
        assert by_fraction[1.0]["mean_tau"] == 1.0
        assert by_fraction[1.0]["sd_tau"] == 0.0
        assert by_fraction[1.0]["association"] == "strong"
        for row in summary:
            assert -1.0 <= row["mean_tau"] <= 1.0
            assert 0.0 <= row["mean_similarity"] <= 1.0
            assert row["sd_tau"] >= 0.0
            assert row["association"] == association_strength(row["mean_tau"])

    def test_deterministic_given_seed(self):
        first = run_scalability_experiment(self.comps, **self.kwargs)
        second = run_scalability_experiment(self.comps, **self.kwargs)
        assert first == second

    def test_dropped_comparisons_excluded(self):
        tie = AggregatedComparison(
            pair=PairKey("planted-s000", "planted-s001"),
            scores=(1, 1, 1, -1, -1, -1),
            sum_score=0,
            percent_agreement=0.5,
            outcome="Dropped",
        )
        reports, _ = run_scalability_experiment(
            [c for c in self.comps if c.pair != tie.pair] + [tie], **self.kwargs
        )
        assert len(reports) == 4 * 2

    def test_all_dropped_raises(self):
        tie = AggregatedComparison(
            pair=PairKey("a", "b"),
            scores=(1, 1, 1, -1, -1, -1),
            sum_score=0,
            percent_agreement=0.5,
            outcome="Dropped",
        )
        with pytest.raises(NoData):
            run_scalability_experiment([tie], simulations=1, seed=0)


def test_default_fractions():
    assert DEFAULT_FRACTIONS == (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)

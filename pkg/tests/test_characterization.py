import math
import random
from collections import Counter, defaultdict

import numpy as np
import pytest

from extval import characterization as ch
from extval.info_measures import model_cost, q_scores
from extval.model_family import ModelParams, build_joint
from extval.tables import expected_table

import oracles


@pytest.fixture(scope="module")
def grid():
    return ch.evaluate_grid()


@pytest.fixture(scope="module")
def report(grid):
    return ch.violation_report(grid)


class TestEnumerate:
    def test_default(self):
        combos = ch.enumerate_valid(ch.GridSpec())
        assert len(combos) == 760
        keys = [(p.useful_clusters, p.noise_clusters, p.eps1, p.eps2) for p in combos]
        assert keys == sorted(keys)

    def test_no_noise(self):
        assert len(ch.enumerate_valid(ch.GridSpec(noise=(0,), eps2=(0.0,)))) == 40

    def test_all_invalid(self):
        assert ch.enumerate_valid(ch.GridSpec(noise=(0,), eps2=(0.1,))) == []

    def test_rational_eps(self):
        assert ch.DEFAULT_EPS1[1] == 1 / 15
        assert ch.DEFAULT_EPS1[3] == 0.2
        spec = ch.GridSpec.from_dict({"eps1": ["0", "1/15", "2/15", "1/5"]})
        assert spec.eps1 == ch.DEFAULT_EPS1

    @pytest.mark.parametrize(
        "data",
        [{"useful": [3, 2]}, {"eps2": []}, {"eps1": [0.5, 1.0]}, {"bogus": 1}, {"noise": [-1, 0]}],
    )
    def test_bad_spec(self, data):
        with pytest.raises(ch.InvalidParameterError):
            ch.GridSpec.from_dict(data)


class TestEvaluate:
    def test_rows(self, grid):
        assert len(grid) == 760

    def test_table1_row(self, grid, golden):
        row = grid.get(5, 3, 0.2, 0.3)
        for m, v in golden["measures_expected"].items():
            assert row.measures[m] == pytest.approx(v, abs=1e-12), m

    def test_table1_row_plugin(self, golden):
        v = ch.evaluate_model(ModelParams(5, 5, 3, 0.2, 0.3), 500, "plugin")
        for m, value in golden["measures_plugin"].items():
            assert v[m] == pytest.approx(value, abs=1e-12), m

    def test_perfect_row(self, grid):
        v = grid.get(5, 0, 0.0, 0.0).measures
        for m in ("q2", "rand", "jaccard", "fowlkes_mallows", "gamma", "hamming"):
            assert v[m] == pytest.approx(1.0, abs=1e-12), m
        assert v.q0 == pytest.approx(float(oracles.q_bounds([[100 if c == k else 0 for k in range(5)] for c in range(5)])[0]), abs=1e-12)

    def test_unknown_convention(self):
        with pytest.raises(ValueError):
            ch.evaluate_model(ModelParams(5, 5, 0, 0, 0), 500, "rounded")

    def test_ranges(self, grid):
        for m in ("q2", "rand", "jaccard", "fowlkes_mallows", "hamming"):
            v = grid.values(m)
            assert np.all((v >= -1e-12) & (v <= 1 + 1e-12)), m
        g = grid.values("gamma")
        assert np.all(np.abs(g) <= 1 + 1e-12)
        assert not any(row.measures.degenerate for row in grid.rows)

    def test_deterministic(self, grid):
        again = ch.evaluate_grid()
        assert [r.measures.values() for r in again.rows] == [r.measures.values() for r in grid.rows]

    def test_parallel_matches_serial(self, grid):
        par = ch.evaluate_grid(workers=2)
        assert [r.measures.values() for r in par.rows] == [r.measures.values() for r in grid.rows]


def test_report_independent_of_row_order(grid, report):
    rows = list(grid.rows)
    random.Random(3).shuffle(rows)
    shuffled = ch.violation_report(ch.GridResult(grid.spec, tuple(rows)))
    for name, check in report.checks.items():
        assert shuffled.checks[name].failed == check.failed
        assert shuffled.checks[name].instances == check.instances


class TestP1:
    def test_q_measures_clean(self, report):
        for part in ("P1", "P1.1", "P1.2"):
            assert report.failed(part, "q2") == 0
            assert report.failed(part, "q0") == 0

    def test_hamming(self, report):
        vs = report.checks["P1"].violations["hamming"]
        assert len(vs) == 2
        for v in vs:
            assert v.step == (10, 11)
            assert abs(v.delta) <= ch.STRICT_TOL

    def test_rand_peak(self, grid, report):
        assert report.failed("P1", "rand") == 12
        fixed = {v.fixed for v in report.checks["P1"].violations["rand"]}
        for f in fixed:
            f = dict(f)
            series = [grid.get(ku, f["noise_clusters"], f["eps1"], f["eps2"]).measures.rand for ku in grid.spec.useful]
            assert grid.spec.useful[int(np.argmax(series))] in (6, 7)
            assert f["eps1"] == 0.2 and f["eps2"] >= 0.2

    def test_other_measures_clean(self, report):
        for m in ("jaccard", "fowlkes_mallows", "gamma"):
            assert report.failed("P1", m) == 0


class TestP2:
    def test_table2(self, report):
        assert report.checks["P2"].sequences == 120
        assert ch.table2(report) == {
            "rand": 120,
            "fowlkes_mallows": 103,
            "gamma": 120,
            "jaccard": 80,
            "hamming": 120,
        }
        assert report.failed("P2", "q2") == 0

    def test_plugin_convention(self):
        rep = ch.violation_report(ch.evaluate_grid(pair_convention="plugin"))
        t2 = ch.table2(rep)
        assert (t2["rand"], t2["gamma"], t2["hamming"]) == (120, 120, 120)
        assert abs(t2["fowlkes_mallows"] - 103) <= 5
        assert abs(t2["jaccard"] - 80) <= 5

    def test_hamming_insensitive_when_matched_cell_dominates(self, grid):
        # the noise cell of a single noise cluster never beats the matched cell for ku <= |C|
        for ku in (2, 3, 4, 5):
            for e1 in grid.spec.eps1:
                for e2 in (0.1, 0.2, 0.3):
                    series = [grid.get(ku, kn, e1, e2).measures.hamming for kn in range(1, 7)]
                    assert max(series) - min(series) <= 1e-12

    def test_hamming_never_decreases_strictly_everywhere(self, report):
        assert report.failed("P2", "hamming") == 120


class TestP3:
    def test_eps1_clean(self, report):
        assert all(v == 0 for v in report.checks["P3.1"].failed.values())

    def test_eps2(self, report):
        check = report.checks["P3.2"]
        for m in ch.MEASURES:
            if m != "rand":
                assert check.failed[m] == 0, m
        assert check.failed["rand"] == 28
        sequences = {v.fixed for v in check.violations["rand"]}
        assert Counter(dict(f)["useful_clusters"] for f in sequences) == {2: 24, 3: 4}

    def test_cond_entropy_increases_with_eps1(self, grid):
        for row in grid.rows:
            p = row.params
            i = grid.spec.eps1.index(p.eps1)
            if i + 1 == len(grid.spec.eps1):
                continue
            nxt = grid.get(p.useful_clusters, p.noise_clusters, grid.spec.eps1[i + 1], p.eps2)
            h0 = q_scores(expected_table(build_joint(p), 500)).h_cond_bits
            h1 = q_scores(expected_table(build_joint(nxt.params), 500)).h_cond_bits
            assert h1 > h0

    def test_cost_depends_only_on_column_sums(self, grid):
        costs = defaultdict(set)
        for row in grid.rows:
            t = expected_table(build_joint(row.params), 500)
            costs[tuple(np.round(t.cluster_marginal, 9))].add(round(model_cost(t), 12))
        assert all(len(v) == 1 for v in costs.values())


class TestRanks:
    def test_q2_matches_q0(self, grid):
        ranks = ch.rank_table(grid)
        assert np.array_equal(ranks["q2"], ranks["q0"])

    def test_perfect_first(self, grid):
        ranks = ch.rank_table(grid)
        i = next(i for i, r in enumerate(grid.rows) if r.key == (5, 0, 0.0, 0.0))
        for m, r in ranks.items():
            assert r[i] == 1.0, m

    def test_ties_averaged(self):
        spec = ch.GridSpec(useful=(5,), noise=(1, 2), eps1=(0.0,), eps2=(0.1,))
        ranks = ch.rank_table(ch.evaluate_grid(spec))
        assert ranks["hamming"].tolist() == [1.5, 1.5]

    def test_spearman(self, grid):
        for m, rho in ch.rank_correlations(grid).items():
            if m == "q0":
                assert rho == pytest.approx(1.0)
            else:
                assert 0 < rho < 1, m


@pytest.fixture(scope="module")
def sweep():
    return ch.sweep_eps1()


class TestSweep:
    def test_default_points(self, sweep):
        assert len(sweep) == 17
        assert sweep[-1].eps1 == 0.8
        assert sweep[1].eps1 == 0.05

    def test_start_perfect(self, sweep):
        v = sweep[0].measures
        for m in ("q2", "rand", "jaccard", "fowlkes_mallows", "gamma", "hamming"):
            assert v[m] == pytest.approx(1.0, abs=1e-9)

    def test_monotone(self, sweep):
        for m in ch.MEASURES:
            series = [ch.oriented(m, pt.measures[m]) for pt in sweep]
            assert all(b < a for a, b in zip(series, series[1:])), m

    def test_end_value(self, sweep):
        # at eps1 = 0.8 every p(k|c) is 1/5: classes and clusters independent
        lo = 5 * math.log2(math.comb(104, 4)) / 500
        l5 = math.log2(5)
        assert sweep[-1].measures.q2 == pytest.approx((l5 - lo) / (2 * l5 - lo), abs=1e-12)
        assert 0 < sweep[-1].measures.q2 < 1

    def test_rejects_unsorted(self):
        with pytest.raises(ch.InvalidParameterError):
            ch.sweep_eps1([0.2, 0.1])

"""Boundary condition sums, sufficient coefficient criteria, averages and array criteria."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heavylin.coefficients import CoefficientSeq
from heavylin.conditions import (
    CONSISTENT,
    FAILS,
    HOLDS,
    INAPPLICABLE,
    INCONSISTENT,
    ConditionReport,
    array_criterion,
    boundary_array,
    cesaro_average,
    corollary_check,
    fdd_condition,
    fdd_condition_trend,
    select_jn,
    simplified_condition,
)
from heavylin.innovations import SlowlyVarying, TailModel, norming_constant
from oracles import cesaro_brute

CANCEL = CoefficientSeq.finite([1.0, -1.0])
PARETO_HALF = TailModel(alpha=0.5, p=1.0, q=0.0)
EXAMPLE = CoefficientSeq.power_log(0.6, 0.5, 10**4)
EXAMPLE_MODEL = TailModel(alpha=0.6)


def boundary_oracle(seq, model, n, r):
    """Direct loop over every j with the tail evaluated as a plain power times h."""
    a_n = norming_constant(model, n)
    left, right = [], []
    for j in range(1 - seq.hi - 5, n - seq.lo + 6):
        d = sum(float(seq.coeff(k)) for k in range(1 - j, n - j + 1))
        if d == 0 or 1 <= j <= n:
            continue
        term = (abs(d) / (r * a_n)) ** model.alpha * float(model.h(r * a_n / abs(d)))
        (left if j <= 0 else right).append(term)
    return math.fsum(left), math.fsum(right)


class TestFddCondition:
    @pytest.mark.parametrize("n", [100, 1000, 10_000])
    def test_cancel_closed_form(self, n):
        """Only d_{n,0} = -1 is nonzero on the boundary; every right-hand d sums c_k with k < 0."""
        sums = fdd_condition(CANCEL, PARETO_HALF, n)
        assert sums.left == pytest.approx(1 / n, rel=1e-12)
        assert sums.right == 0.0

    def test_single_tap_is_zero(self):
        assert fdd_condition(CoefficientSeq.finite([3.0]), PARETO_HALF, 50) == (0.0, 0.0)

    def test_zero_sequence(self):
        assert fdd_condition(CoefficientSeq.finite([0.0, 0.0]), PARETO_HALF, 10) == (0.0, 0.0)

    @pytest.mark.parametrize("model", [TailModel(alpha=0.75), TailModel(alpha=1.4, p=0.3, q=0.7),
                                       TailModel(alpha=0.9, h=SlowlyVarying.log_power(0.5))])
    def test_against_direct_loop(self, model):
        seq = CoefficientSeq.finite([0.4, -1.0, 2.0, 0.3], offset=-2)
        for n in (5, 37):
            got = fdd_condition(seq, model, n, r=0.7)
            np.testing.assert_allclose(got, boundary_oracle(seq, model, n, 0.7), rtol=1e-12)

    @given(st.lists(st.floats(-5, 5).filter(lambda v: abs(v) > 1e-3), min_size=1, max_size=6),
           st.integers(-3, 3), st.integers(1, 200), st.floats(0.01, 100.0), st.floats(0.2, 1.9))
    @settings(max_examples=200, deadline=None)
    def test_r_scaling(self, values, offset, n, r, alpha):
        seq = CoefficientSeq.finite(values, offset)
        model = TailModel(alpha=alpha, p=0.5, q=0.5)
        one = fdd_condition(seq, model, n, 1.0)
        scaled = fdd_condition(seq, model, n, r)
        for a, b in zip(scaled, one):
            assert a == pytest.approx(r ** -alpha * b, rel=1e-12, abs=1e-300)

    @given(st.lists(st.floats(-3, 3), min_size=1, max_size=5), st.integers(-2, 2),
           st.lists(st.floats(-3, 3), min_size=1, max_size=5), st.integers(-2, 2),
           st.integers(1, 100), st.floats(0.2, 1.9))
    @settings(max_examples=200, deadline=None)
    def test_additivity_bound(self, v1, o1, v2, o2, n, alpha):
        a, b = CoefficientSeq.finite(v1, o1), CoefficientSeq.finite(v2, o2)
        model = TailModel(alpha=alpha, p=0.5, q=0.5)
        both = fdd_condition(a + b, model, n, 1.0)
        half_a, half_b = fdd_condition(a, model, n, 0.5), fdd_condition(b, model, n, 0.5)
        for side in (0, 1):
            bound = half_a[side] + half_b[side]
            assert both[side] <= bound * (1 + 1e-12) + 1e-300

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            fdd_condition(CANCEL, PARETO_HALF, 0)
        with pytest.raises(ValueError):
            fdd_condition(CANCEL, PARETO_HALF, 10, r=0.0)


class TestTrend:
    def test_cancel_trend(self):
        report = fdd_condition_trend(CANCEL, PARETO_HALF, [100, 1000, 10_000])
        np.testing.assert_allclose(report.left, [1e-2, 1e-3, 1e-4], rtol=1e-12)
        assert report.right == [0.0, 0.0, 0.0]
        assert report.verdict_left == CONSISTENT and report.verdict == CONSISTENT

    def test_power_log_trend(self):
        report = fdd_condition_trend(EXAMPLE, EXAMPLE_MODEL, [100, 1000, 10_000])
        for side in (report.left, report.right):
            assert side[0] > side[1] > side[2] and side[2] < 1e-2
        assert report.verdict == CONSISTENT
        assert report.omitted_abs_mass > 0

    def test_zero_sequence(self):
        report = fdd_condition_trend(CoefficientSeq.finite([0.0]), PARETO_HALF, [10, 100, 1000])
        assert report.left == [0.0] * 3 and report.verdict == CONSISTENT

    def test_large_final_value_is_inconsistent(self):
        report = fdd_condition_trend(CANCEL, PARETO_HALF, [10, 20, 50], threshold=1e-2)
        assert report.verdict_left == INCONSISTENT

    def test_rejects_unsorted_list(self):
        with pytest.raises(ValueError):
            fdd_condition_trend(CANCEL, PARETO_HALF, [100, 10])

    def test_report_export(self):
        report = fdd_condition_trend(CANCEL, PARETO_HALF, [10, 100, 1000])
        data = report.to_dict()
        assert data["verdict"] == report.verdict and data["n_values"] == [10, 100, 1000]
        assert "left" in report.table().splitlines()[0]
        again = fdd_condition_trend(CANCEL, PARETO_HALF, [10, 100, 1000])
        assert again.to_json() == report.to_json()
        assert isinstance(report, ConditionReport)


class TestSimplified:
    def test_finite_support_windows_miss(self):
        seq = CoefficientSeq.finite([1.0, 2.0, 3.0])
        assert simplified_condition(seq, PARETO_HALF, 100, j_n=3) == (0.0, 0.0, 0.0, 0.0)

    def test_cancel(self):
        assert simplified_condition(CANCEL, PARETO_HALF, 100, j_n=2) == (0.0, 0.0, 0.0, 0.0)

    def test_restricted_sup_is_smaller(self):
        n = 10_000
        seq = CoefficientSeq.power_log(0.6, 0.5, 10**5)
        res = simplified_condition(seq, EXAMPLE_MODEL, n)
        full_left = np.abs(seq.d(n, np.arange(1 - seq.hi, 1))).max()
        assert res.sup_d_left < full_left
        assert res.left <= fdd_condition(seq, EXAMPLE_MODEL, n).left

    def test_rejects_bad_jn(self):
        with pytest.raises(ValueError):
            simplified_condition(CANCEL, PARETO_HALF, 10, j_n=10)


class TestSufficientConditions:
    def test_geometric_beta_summable(self):
        res = corollary_check(CoefficientSeq.geometric(0.5, 60), TailModel(alpha=0.8),
                              "beta_summable", beta=0.4)
        assert res["verdict"] == HOLDS
        q = 2 ** -0.4
        assert res["window_sum"] + res["omitted_tail"] == pytest.approx(1 + 2 * q / (1 - q), rel=1e-12)

    @pytest.mark.parametrize("beta", [0.2, 0.4, 0.55])
    def test_power_log_beta_summable_fails(self, beta):
        res = corollary_check(EXAMPLE, EXAMPLE_MODEL, "beta_summable", beta=beta)
        assert res["verdict"] == FAILS
        assert res["window_sum"] > res["half_window_sum"]

    def test_alpha_above_one(self):
        seq = CoefficientSeq.geometric(0.5, 60)
        assert corollary_check(seq, TailModel(alpha=1.5), "alpha_above_one")["verdict"] == HOLDS
        assert corollary_check(seq, TailModel(alpha=0.5), "alpha_above_one")["verdict"] == INAPPLICABLE
        harmonic = CoefficientSeq.power(1.0, 1000)
        assert corollary_check(harmonic, TailModel(alpha=1.5), "alpha_above_one")["verdict"] == FAILS

    def test_bounded_ratio(self):
        res = corollary_check(EXAMPLE, EXAMPLE_MODEL, "bounded_ratio")
        assert res["verdict"] == HOLDS and res["M"] == 1.0 and res["well_defined"]
        rising = TailModel(alpha=0.6, h=SlowlyVarying.log_power(0.5))
        assert corollary_check(EXAMPLE, rising, "bounded_ratio")["verdict"] == INAPPLICABLE
        assert corollary_check(EXAMPLE, TailModel(alpha=1.2), "bounded_ratio")["verdict"] == INAPPLICABLE

    def test_weak_regularity_finite_support_holds(self):
        res = corollary_check(CoefficientSeq.finite([2.0, 1.0]), TailModel(alpha=0.75),
                              "weak_regularity", gamma=0.3)
        assert res["verdict"] == HOLDS
        assert math.isfinite(res["K_plus"]) and math.isfinite(res["K_minus"])

    def test_weak_regularity_single_window_term(self):
        """For decaying coefficients the one-point window at the scan edge dominates."""
        alpha, gamma = 0.6, 0.1
        res = corollary_check(EXAMPLE, EXAMPLE_MODEL, "weak_regularity", gamma=gamma)
        e = (1 - alpha) * (alpha - gamma) / (1 - alpha + gamma)
        edge = abs(EXAMPLE.coeff(res["j_scan"] + 1)) ** (e - alpha)
        assert res["exponent"] == pytest.approx(e)
        assert res["K_plus"] == pytest.approx(edge, rel=1e-12)
        assert res["K_plus"] > res["K_plus_half_scan"]
        assert res["verdict"] == FAILS

    def test_weak_regularity_inapplicable_above_one(self):
        res = corollary_check(EXAMPLE, TailModel(alpha=1.2), "weak_regularity", gamma=0.5)
        assert res["verdict"] == INAPPLICABLE

    @pytest.mark.parametrize("which,kwargs", [("beta_summable", {"beta": 0.7}),
                                              ("beta_summable", {}),
                                              ("weak_regularity", {"gamma": 0.6}),
                                              ("mystery", {})])
    def test_parameter_errors(self, which, kwargs):
        with pytest.raises(ValueError):
            corollary_check(EXAMPLE, EXAMPLE_MODEL, which, **kwargs)


class TestCesaro:
    def test_closed_form_at_one(self):
        assert cesaro_average([2.0 ** -k for k in range(1, 60)], 1) == pytest.approx(1.0, rel=1e-15)

    def test_zero(self):
        assert cesaro_average(np.zeros(10), 7) == 0.0

    def test_decreasing_geometric(self):
        b = CoefficientSeq.geometric(0.5, 60, sides="right")
        vals = [cesaro_average(b, n) for n in (10, 100, 1000)]
        assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-2

    def test_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            b = rng.integers(-20, 20, size=int(rng.integers(1, 40))).astype(float)
            n = int(rng.integers(1, 51))
            assert cesaro_average(b, n) == cesaro_brute(b, n)

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            cesaro_average([1.0], 0)


class TestArrayCriterion:
    def test_reference_rows_are_one(self):
        alpha = 0.75
        model = TailModel(alpha=alpha)
        rows = [np.full(n, n ** (-1 / alpha)) for n in (10, 100, 1000)]
        np.testing.assert_allclose(array_criterion(rows, model), 1.0, rtol=1e-12)

    def test_zero_rows(self):
        assert array_criterion([np.zeros(5)], TailModel(alpha=0.75)) == [0.0]

    def test_boundary_array_decreases(self):
        seq = CoefficientSeq.finite([2.0, 1.0])
        model = TailModel(alpha=0.75)
        ns = (10, 100, 1000, 10_000)
        sums = array_criterion([boundary_array(seq, n, norming_constant(model, n)) for n in ns], model)
        assert all(b < a for a, b in zip(sums, sums[1:]))
        # only the last weight, A - d_{n,n} = c_1, is nonzero
        a_n = norming_constant(model, 100)
        np.testing.assert_array_equal(np.flatnonzero(boundary_array(seq, 100, a_n)), [99])


class TestSelectJn:
    @pytest.mark.parametrize("row", [lambda n: np.full(n, 1.0 / n),
                                     lambda n: np.arange(1, n + 1) ** -0.5 / math.sqrt(n)])
    def test_properties(self, row):
        n_max = 3000
        jn = select_jn(row, n_max)
        assert np.all(np.diff(jn) >= 0)
        assert jn[-1] >= 3
        ns = np.arange(1, n_max + 1)
        heads = np.array([np.abs(row(n))[:j].sum() for n, j in zip(ns, jn)])
        active = jn > 0
        assert np.all(heads[active] < 1.0 / jn[active])
        assert np.all(jn[active] ** 2 <= ns[active])

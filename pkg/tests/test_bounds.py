import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isingpairs.bounds import (
    BoundReport,
    bernstein,
    coupling_bound,
    misid_bound_finite,
    misid_bound_infinite,
    v_analytic_bounds,
)
from isingpairs.errors import DobrushinViolationError
from isingpairs.potential import PairwisePotential


class TestBernstein:
    def test_frozen_value(self):
        # 2 exp(-1000 * 0.0025 / (2 * (0.9 + 0.05/3)))
        assert bernstein(1000, 0.05, 0.9, 1.0) == pytest.approx(0.5114583198262012, rel=1e-12)

    def test_hand_checked_value(self):
        # 2 exp(-1 / (2 (0.25 + 0.1/3))) ~ 2 exp(-1.7647)
        assert bernstein(100, 0.1, 0.25, 1.0) == pytest.approx(0.3428, abs=5e-4)

    def test_doubling_n_squares_the_factor(self):
        one = bernstein(100, 0.1, 0.25, 1.0)
        two = bernstein(200, 0.1, 0.25, 1.0)
        assert two == pytest.approx(one**2 / 2, rel=1e-12)

    def test_monotone_in_n_and_epsilon(self):
        by_n = [bernstein(n, 0.05, 0.5, 1.0) for n in (10, 100, 1000, 10000)]
        assert by_n == sorted(by_n, reverse=True)
        by_eps = [bernstein(1000, e, 0.5, 1.0) for e in (0.01, 0.05, 0.1, 0.5)]
        assert by_eps == sorted(by_eps, reverse=True)

    def test_increasing_in_variance(self):
        by_v = [bernstein(1000, 0.05, v, 1.0) for v in (0.1, 0.5, 0.9)]
        assert by_v == sorted(by_v)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            bernstein(0, 0.05, 0.5, 1.0)
        with pytest.raises(ValueError):
            bernstein(10, -0.1, 0.5, 1.0)
        with pytest.raises(ValueError):
            bernstein(10, 0.1, 0.0, 1.0)


class TestMisidentificationBounds:
    def test_finite_frozen_value(self):
        rep = misid_bound_finite(20000, 0.05, 0.9, 1, 2)
        assert rep.value == pytest.approx(12.250422377175626, rel=1e-12)
        assert rep.theorem == "finite-range-misid"
        assert rep.vacuous
        assert rep.inputs["n"] == 20000

    def test_hand_checked_nonvacuous_value(self):
        # 4 exp(-100/(7.2 + 0.0133...) + 8)
        rep = misid_bound_finite(10**6, 0.01, 0.9, 1, 2)
        assert rep.value == pytest.approx(0.011368352221717806, rel=1e-12)

    def test_becomes_nonvacuous_at_large_n(self):
        rep = misid_bound_finite(100000, 0.05, 0.9, 1, 2)
        assert rep.value < 1
        assert not rep.vacuous

    def test_never_clamped(self):
        rep = misid_bound_finite(10, 0.01, 0.9, 2, 2)
        assert rep.value > 1e6

    def test_infinite_adds_truncation_penalty(self):
        fin = misid_bound_finite(1000, 0.05, 0.9, 1, 2)
        inf = misid_bound_infinite(1000, 0.05, 0.9, 1, 2, r=0.5, tail=1e-6)
        penalty = 1000 * 4 * 1e-6 / 0.5
        assert inf.value == pytest.approx(fin.value + penalty, rel=1e-12)
        assert inf.inputs["tail"] == 1e-6

    def test_infinite_zero_tail_equals_finite(self):
        fin = misid_bound_finite(1000, 0.05, 0.9, 1, 2)
        inf = misid_bound_infinite(1000, 0.05, 0.9, 1, 2, r=0.5, tail=0.0)
        assert inf.value == fin.value

    def test_dobrushin_violation(self):
        with pytest.raises(DobrushinViolationError):
            misid_bound_infinite(1000, 0.05, 0.9, 1, 2, r=1.0, tail=0.1)

    @given(
        st.integers(1, 10**6),
        st.floats(1e-4, 0.5),
        st.floats(1e-4, 0.99),
        st.integers(1, 3),
        st.integers(1, 3),
    )
    @settings(max_examples=100, deadline=None)
    def test_finite_bound_nonnegative(self, n, eps, v, L, d):
        # may underflow to exactly 0 at large n, which is acceptable
        value = misid_bound_finite(n, eps, v, L, d).value
        assert value >= 0 and math.isfinite(value)


class TestCouplingBound:
    def test_zero_when_truncation_exact(self):
        J = PairwisePotential(((0,), (1,)), {((0,), (1,)): 0.2})
        assert coupling_bound(J, 1) == 0.0

    def test_single_long_edge(self):
        J = PairwisePotential(((0,), (5,)), {((0,), (5,)): 0.3})
        # r = 0.3, tail beyond L=1 is 0.3
        assert coupling_bound(J, 1) == pytest.approx(0.3 / 0.7, rel=1e-12)

    def test_hand_checked_vacuous_value(self):
        # r = 0.8 with 0.4 of it beyond L = 1 gives 0.4/0.2 = 2, reported raw
        J = PairwisePotential(
            ((0,), (1,), (5,)), {((0,), (1,)): 0.4, ((0,), (5,)): 0.4}
        )
        assert coupling_bound(J, 1) == pytest.approx(2.0, rel=1e-12)

    def test_monotone_in_truncation_radius(self):
        J = PairwisePotential(
            ((0,), (1,), (3,), (5,)),
            {((0,), (1,)): 0.2, ((0,), (3,)): 0.2, ((0,), (5,)): 0.2},
        )
        values = [coupling_bound(J, L) for L in (1, 2, 3, 4, 5)]
        assert values == sorted(values, reverse=True)

    def test_requires_contraction(self):
        J = PairwisePotential(((0,), (5,)), {((0,), (5,)): 1.2})
        with pytest.raises(DobrushinViolationError):
            coupling_bound(J, 1)


class TestVarianceEnvelope:
    def test_independent_case(self):
        # r = 0 collapses the envelope to the point 2^-(2L)^d
        assert v_analytic_bounds(0.0, 1, 1) == pytest.approx((0.25, 0.25), rel=1e-12)

    def test_frozen_values(self):
        lo, hi = v_analytic_bounds(0.8, 1, 2)
        assert lo == pytest.approx(0.02099770185825944, rel=1e-12)
        assert hi == pytest.approx(0.4792164218076929, rel=1e-12)

    @given(st.floats(0, 0.99), st.integers(1, 3), st.integers(1, 3))
    @settings(max_examples=100, deadline=None)
    def test_ordering(self, r, L, d):
        lo, hi = v_analytic_bounds(r, L, d)
        assert 0 < lo <= hi <= 1

    def test_requires_contraction(self):
        with pytest.raises(DobrushinViolationError):
            v_analytic_bounds(1.0, 1, 2)


class TestBoundReport:
    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            BoundReport("x", -0.1)

    def test_vacuous_flag(self):
        assert BoundReport("x", 1.5).vacuous
        assert not BoundReport("x", 1.0).vacuous

import math

import numpy as np
import pytest

from isingpairs.estimator import (
    ThresholdSchedule,
    empirical_D,
    empirical_conditional,
    empirical_prob,
    estimate_neighborhood,
    estimate_report,
    scale_L,
    threshold,
)
from isingpairs.potential import PairwisePotential, ball_sites
from isingpairs.sampler import Sample, generate_sample


def nn_potential(width, J=0.2):
    sites = [(x, y) for x in range(width) for y in range(width)]
    couplings = {}
    for a in sites:
        for b in sites:
            if a < b and abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1:
                couplings[(a, b)] = J
    return PairwisePotential(tuple(sites), couplings)


def hand_sample(spins, sites=None):
    spins = np.asarray(spins, dtype=np.int8)
    if sites is None:
        sites = tuple((k,) for k in range(spins.shape[1]))
    return Sample(
        sites=sites,
        spins=spins,
        seed=0,
        step_cap=10**8,
        coalescence_steps=np.ones(spins.shape[0], dtype=np.int64),
    )


class TestSchedules:
    def test_simple(self):
        sched = ThresholdSchedule("simple", C=0.08, d=2)
        assert threshold(sched, 1, 1600) == pytest.approx(0.002, abs=1e-15)

    def test_theoretical_frozen_value(self):
        sched = ThresholdSchedule("theoretical", C=1.0, d=1)
        assert threshold(sched, 1, 1) == pytest.approx(1.245635173374914, abs=1e-12)

    def test_theoretical_decreasing_in_n_and_L(self):
        sched = ThresholdSchedule("theoretical", C=0.5, d=2)
        by_n = [threshold(sched, 1, n) for n in (10, 100, 1000)]
        assert by_n == sorted(by_n, reverse=True)
        by_L = [threshold(sched, L, 100) for L in (1, 2, 3)]
        assert by_L == sorted(by_L, reverse=True)

    def test_invalid(self):
        with pytest.raises(ValueError):
            ThresholdSchedule("other", C=0.1, d=2)
        with pytest.raises(ValueError):
            ThresholdSchedule("simple", C=0.0, d=2)
        with pytest.raises(ValueError):
            threshold(ThresholdSchedule("simple", C=0.1, d=2), 1, 0)

    def test_scale_L(self):
        assert scale_L(10**6, 1) == 5
        assert scale_L(100, 2) == 1
        assert scale_L(158, 2) == 1
        assert scale_L(8000, 2) == 1
        with pytest.raises(ValueError):
            scale_L(1, 2)


class TestEmpiricalMeasures:
    # a tiny 1d sample where every count can be checked by hand
    SPINS = [
        [1, 1, 1],
        [1, 1, -1],
        [1, -1, 1],
        [-1, 1, 1],
        [1, 1, 1],
        [-1, -1, -1],
    ]

    def test_prob_exact_counts(self):
        sample = hand_sample(self.SPINS)
        assert empirical_prob(sample, {(0,): 1}) == pytest.approx(4 / 6)
        assert empirical_prob(sample, {(0,): 1, (1,): 1}) == pytest.approx(3 / 6)
        assert empirical_prob(sample, {(0,): -1, (2,): 1}) == pytest.approx(1 / 6)

    def test_prob_additivity(self):
        sample = hand_sample(self.SPINS)
        base = {(1,): 1}
        total = empirical_prob(sample, {**base, (0,): 1}) + empirical_prob(sample, {**base, (0,): -1})
        assert total == pytest.approx(empirical_prob(sample, base), abs=1e-15)

    def test_conditional_exact(self):
        sample = hand_sample(self.SPINS)
        # among draws with x(1)=+1: spins at 0 are +,+,-,+ -> 3/4
        assert empirical_conditional(sample, (0,), 1, {(1,): 1}) == pytest.approx(3 / 4)

    def test_conditional_zero_convention(self):
        sample = hand_sample([[1, 1], [1, 1]])
        assert empirical_conditional(sample, (0,), 1, {(1,): -1}) == 0.0

    def test_conditional_rejects_center_in_pattern(self):
        sample = hand_sample(self.SPINS)
        with pytest.raises(ValueError):
            empirical_conditional(sample, (0,), 1, {(0,): 1})

    def test_empirical_D_by_hand(self):
        sample = hand_sample(self.SPINS)
        i, j = (1,), (0,)
        x = {(0,): 1, (1,): 1, (2,): 1}
        with_j = empirical_conditional(sample, i, 1, {(0,): 1, (2,): 1})
        without_j = empirical_conditional(sample, i, 1, {(2,): 1})
        weight = empirical_prob(sample, {(0,): 1, (2,): 1})
        want = abs(with_j - without_j) * weight
        assert empirical_D(sample, i, j, 1, x) == pytest.approx(want, abs=1e-15)


class TestNeighborhoodEstimate:
    def test_scores_match_direct_formula(self):
        # cross-check the packed-count implementation against the direct
        # empirical_D maximum over observed patterns and both center spins
        J = nn_potential(3)
        sample = generate_sample(J, None, 400, seed=21)
        i, L = (1, 1), 1
        est = estimate_neighborhood(sample, i, L, epsilon=0.01)
        ball = ball_sites(i, L)
        cols = {s: k for k, s in enumerate(sample.sites)}
        for j in ball:
            if j == i:
                continue
            best = 0.0
            seen = {tuple(row) for row in sample.spins[:, [cols[s] for s in ball]]}
            for row in seen:
                x = dict(zip(ball, row))
                for s in (1, -1):
                    x[i] = s
                    best = max(best, empirical_D(sample, i, j, L, x))
            assert est.scores[j] == pytest.approx(best, abs=1e-12)

    def test_restricted_equals_exhaustive(self):
        J = nn_potential(3)
        sample = generate_sample(J, None, 300, seed=13)
        a = estimate_neighborhood(sample, (1, 1), 1, epsilon=0.005)
        b = estimate_neighborhood(sample, (1, 1), 1, epsilon=0.005, exhaustive=True)
        assert a.scores == pytest.approx(b.scores)
        assert a.selected == b.selected

    def test_monotone_in_epsilon(self):
        sample = generate_sample(nn_potential(3), None, 300, seed=13)
        prev = None
        for eps in (0.0, 0.001, 0.01, 0.1, 1.0):
            cur = estimate_neighborhood(sample, (1, 1), 1, eps).selected
            if prev is not None:
                assert cur <= prev
            prev = cur

    def test_selection_is_strict_exceedance(self):
        sample = generate_sample(nn_potential(3), None, 300, seed=13)
        est = estimate_neighborhood(sample, (1, 1), 1, epsilon=0.01)
        for j, score in est.scores.items():
            assert (j in est.selected) == (score > 0.01)

    def test_draw_order_invariance(self):
        J = nn_potential(3)
        sample = generate_sample(J, None, 200, seed=17)
        rng = np.random.default_rng(0)
        perm = rng.permutation(sample.n)
        shuffled = hand_sample(sample.spins[perm], sites=sample.sites)
        a = estimate_neighborhood(sample, (1, 1), 1, 0.01)
        b = estimate_neighborhood(shuffled, (1, 1), 1, 0.01)
        assert a.scores == pytest.approx(b.scores)

    def test_empirical_D_converges_to_exact(self):
        # CLT-scale agreement at one fixed ball pattern, n = 1e5
        from isingpairs.oracle import exact_distribution, exact_D, exact_v

        J = nn_potential(3)
        model = exact_distribution(J)
        sample = generate_sample(J, None, 10**5, seed=6)
        i = (1, 1)
        x = {s: 1 for s in ball_sites(i, 1)}
        v, _ = exact_v(model, i, 1)
        for j in ((0, 1), (0, 0)):
            want = exact_D(model, i, j, 1, x)
            got = empirical_D(sample, i, j, 1, x)
            assert abs(got - want) <= 3 * math.sqrt(v / sample.n)

    def test_recovers_graph_at_moderate_n(self):
        J = nn_potential(3)
        sample = generate_sample(J, None, 8000, seed=2)
        eps = threshold(ThresholdSchedule("simple", C=0.075, d=2), 1, sample.n)
        est = estimate_neighborhood(sample, (1, 1), 1, eps)
        assert est.selected == frozenset({(0, 1), (1, 0), (1, 2), (2, 1)})

    def test_ball_must_fit_volume(self):
        sample = generate_sample(nn_potential(3), None, 10, seed=1)
        with pytest.raises(ValueError):
            estimate_neighborhood(sample, (0, 0), 1, 0.01)

    def test_report_round_trip_fields(self):
        sample = generate_sample(nn_potential(3), None, 50, seed=1)
        est = estimate_neighborhood(sample, (1, 1), 1, 0.02)
        text = estimate_report(est)
        assert "center 1 1" in text
        assert "threshold" in text and "0.02" in text
        for j in est.selected:
            assert " ".join(map(str, j)) in text

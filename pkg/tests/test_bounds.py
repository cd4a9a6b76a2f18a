import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from endlab.bounds import (BoundInputs, FukNagaevInputs, bennett_bound,
                           bernstein_bound, comparison_gap, fuk_nagaev_bound,
                           fuk_nagaev_general)

POS = st.floats(min_value=1e-100, max_value=1e100, allow_nan=False,
                allow_infinity=False)


def binputs(eps, a=1.0, s=1.0, m=1.0):
    return BoundInputs(epsilon=eps, a=a, s=s, m=m)


def zero_tails(n):
    return [lambda t: 0.0] * n


class TestBennett:
    def test_frozen_value(self):
        # exp(1 - 2 log 2) = e/4, high-precision reference
        result = bennett_bound(binputs(1.0))
        np.testing.assert_allclose(result.bound, 0.6795704571147613, rtol=1e-12)

    def test_limit_at_zero_epsilon(self):
        assert bennett_bound(binputs(0.0)).bound == 1.0
        assert bennett_bound(binputs(1e-300)).bound == pytest.approx(1.0)

    def test_linear_in_m(self):
        base = bennett_bound(binputs(1.0, m=1.0)).bound
        assert bennett_bound(binputs(1.0, m=3.0)).bound == pytest.approx(3.0 * base,
                                                                         rel=1e-12)

    def test_monotone_in_epsilon(self):
        eps = np.geomspace(1e-6, 1e6, 200)
        values = [bennett_bound(binputs(e, a=0.5, s=2.0)).log_bound for e in eps]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            binputs(-1.0)
        with pytest.raises(ValueError):
            binputs(1.0, a=0.0)
        with pytest.raises(ValueError):
            binputs(1.0, s=-2.0)
        with pytest.raises(ValueError):
            binputs(1.0, m=0.5)

    @settings(max_examples=300, deadline=None)
    @given(eps=POS, a=POS, s=POS)
    def test_log_bound_finite_and_below_m(self, eps, a, s):
        result = bennett_bound(BoundInputs(eps, a, s, 1.0))
        assert result.log_bound <= 0.0
        assert not math.isnan(result.log_bound)
        assert result.bound <= 1.0

    def test_extreme_ratio_no_overflow(self):
        # eps*a/s up to 1e300 stays finite in log space
        result = bennett_bound(BoundInputs(1e150, 1e150, 1.0, 1.0))
        assert math.isfinite(result.log_bound)
        assert result.log_bound < 0.0


class TestBernstein:
    def test_frozen_value(self):
        result = bernstein_bound(binputs(1.0))
        np.testing.assert_allclose(result.bound, 0.7788007830714049, rtol=1e-12)

    def test_zero_epsilon_returns_m(self):
        assert bernstein_bound(binputs(0.0, m=7.0)).bound == pytest.approx(7.0)

    def test_crossover_at_five(self):
        # at eps = 5 s/a the entropy-type exponent is already far smaller
        benn = bennett_bound(binputs(5.0))
        bern = bernstein_bound(binputs(5.0))
        np.testing.assert_allclose(benn.log_bound, 5 - 6 * math.log(6), rtol=1e-12)
        np.testing.assert_allclose(bern.log_bound, -25.0 / 12.0, rtol=1e-12)
        assert benn.log_bound < bern.log_bound

    def test_monotone_in_epsilon(self):
        eps = np.geomspace(1e-6, 1e6, 200)
        values = [bernstein_bound(binputs(e, a=2.0, s=0.3)).log_bound for e in eps]
        assert all(b <= a for a, b in zip(values, values[1:]))


class TestDominance:
    def test_bennett_dominates_beyond_five(self):
        """Log-space comparison over a log-spaced (eps, a, s) grid."""
        grid = np.geomspace(1e-3, 1e3, 7)
        for a, s in itertools.product(grid, grid):
            for c in (5.0, 7.0, 20.0, 200.0):
                eps = c * s / a
                benn = bennett_bound(BoundInputs(eps, a, s, 1.0))
                bern = bernstein_bound(BoundInputs(eps, a, s, 1.0))
                assert benn.log_bound <= bern.log_bound + 1e-12


class TestComparisonGap:
    def test_frozen_at_five(self):
        np.testing.assert_allclose(comparison_gap(5.0), -0.0334818174315547,
                                   rtol=1e-10)
        assert comparison_gap(5.0) < 0.0

    def test_nonincreasing_instance(self):
        assert comparison_gap(6.0) <= comparison_gap(5.0)

    def test_asymptotic_ratio(self):
        x = 1e6
        ratio = comparison_gap(x) / (-2.0 * math.log(x))
        assert 0.85 <= ratio <= 1.0

    def test_negative_and_monotone_on_dense_grid(self):
        xs = np.geomspace(5.0, 1e8, 2000)
        values = np.array([comparison_gap(x) for x in xs])
        assert np.all(values < 0.0)
        assert np.all(np.diff(values) <= 0.0)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            comparison_gap(0.0)
        with pytest.raises(ValueError):
            comparison_gap(-3.0)


class TestFukNagaev:
    def test_frozen_value_clamps(self):
        inputs = FukNagaevInputs(epsilon=1.0, lam=1.0, p=1.0,
                                 abs_moment_sum=1.0,
                                 marginal_tails=zero_tails(1))
        result = fuk_nagaev_bound(inputs)
        np.testing.assert_allclose(result.bound, math.e, rtol=1e-12)
        assert result.probability == 1.0

    def test_vanishes_for_large_epsilon(self):
        def tail(t):
            return 0.0 if t > 1.0 else 1.0

        values = [fuk_nagaev_bound(
            FukNagaevInputs(epsilon=e, lam=2.0, p=1.0, abs_moment_sum=5.0,
                            marginal_tails=[tail] * 4)).bound
            for e in (1e3, 1e6, 1e9)]
        assert values[0] > values[1] > values[2]
        assert values[2] < 1e-10

    def test_doubling_m_doubles_exponential_term(self):
        def make(m):
            return FukNagaevInputs(epsilon=2.0, lam=1.5, p=0.5,
                                   abs_moment_sum=3.0,
                                   marginal_tails=zero_tails(3), m=m)

        one = fuk_nagaev_bound(make(1.0))
        two = fuk_nagaev_bound(make(2.0))
        assert two.bound == pytest.approx(2.0 * one.bound, rel=1e-12)

    def test_specialization_matches_general(self):
        inputs = FukNagaevInputs(epsilon=3.0, lam=2.0, p=0.7,
                                 abs_moment_sum=1.7,
                                 marginal_tails=[lambda t: 0.3 / (1 + t)] * 5,
                                 m=2.0)
        direct = fuk_nagaev_bound(inputs)
        general = fuk_nagaev_general(inputs, inputs.epsilon / inputs.lam)
        assert direct.log_bound == general.log_bound

    def test_general_frozen_value(self):
        # p=1, delta=eps, S=1, zero tails: 2 exp(1 - log(1 + eps))
        eps = 3.0
        inputs = FukNagaevInputs(epsilon=eps, lam=1.0, p=1.0,
                                 abs_moment_sum=1.0,
                                 marginal_tails=zero_tails(1))
        result = fuk_nagaev_general(inputs, eps)
        np.testing.assert_allclose(result.bound, 2 * math.exp(1 - math.log(4)),
                                   rtol=1e-12)

    def test_large_delta_deactivates_tail_sum(self):
        def tail(t):
            return 0.0 if t > 10.0 else 0.5

        inputs = FukNagaevInputs(epsilon=1.0, lam=1.0, p=1.0,
                                 abs_moment_sum=1.0, marginal_tails=[tail] * 3)
        result = fuk_nagaev_general(inputs, 1e6)
        assert result.exponent_terms["tail_sum"] == 0.0

    def test_monotone_exponential_term_in_epsilon(self):
        eps = np.geomspace(0.01, 100, 50)
        values = [fuk_nagaev_bound(
            FukNagaevInputs(e, 2.0, 0.5, 1.0, zero_tails(2))).log_bound
            for e in eps]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

    def test_domain_error_on_p(self):
        with pytest.raises(ValueError):
            FukNagaevInputs(1.0, 1.0, 1.5, 1.0, zero_tails(1))
        with pytest.raises(ValueError):
            FukNagaevInputs(1.0, 1.0, 0.0, 1.0, zero_tails(1))


def _enumerate_two_point_row(rng, n):
    """Random zero-mean two-point marginals and the exact row-sum law."""
    uppers = rng.uniform(0.2, 2.0, size=n)
    probs_hi = rng.uniform(0.15, 0.85, size=n)
    lowers = -uppers * probs_hi / (1.0 - probs_hi)
    sums = np.array([0.0])
    masses = np.array([1.0])
    for v_lo, v_hi, p_hi in zip(lowers, uppers, probs_hi):
        sums = (sums[:, None] + np.array([v_lo, v_hi])[None, :]).ravel()
        masses = (masses[:, None] * np.array([1 - p_hi, p_hi])[None, :]).ravel()
    return uppers, lowers, probs_hi, sums, masses


class TestValidityOracle:
    """Exact enumerated tails never exceed the bounds (small random arrays)."""

    def test_bennett_one_sided(self):
        rng = np.random.default_rng(2024)
        for _ in range(8):
            n = int(rng.integers(2, 9))
            uppers, lowers, probs_hi, sums, masses = \
                _enumerate_two_point_row(rng, n)
            a = float(uppers.max())
            s = float(np.sum(uppers ** 2 * probs_hi + lowers ** 2 * (1 - probs_hi)))
            for eps in np.geomspace(0.05, 1.5 * float(np.abs(sums).max()), 12):
                exact = float(masses[sums > eps].sum())
                bound = bennett_bound(BoundInputs(eps, a, s, 1.0)).bound
                assert exact <= bound + 1e-12

    def test_fuk_nagaev_two_sided(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            n = int(rng.integers(2, 8))
            uppers, lowers, probs_hi, sums, masses = \
                _enumerate_two_point_row(rng, n)
            for p, lam in itertools.product((0.5, 1.0), (1.0, 3.0)):
                moment = float(np.sum(np.abs(uppers) ** p * probs_hi
                                      + np.abs(lowers) ** p * (1 - probs_hi)))
                tails = [
                    (lambda t, lo=lo, hi=hi, ph=ph:
                     float((abs(lo) > t) * (1 - ph) + (abs(hi) > t) * ph))
                    for lo, hi, ph in zip(lowers, uppers, probs_hi)]
                inputs = FukNagaevInputs(1.0, lam, p, moment, tails)
                for eps in np.geomspace(0.05, 1.5 * float(np.abs(sums).max()), 8):
                    exact = float(masses[np.abs(sums) > eps].sum())
                    bound = fuk_nagaev_bound(
                        FukNagaevInputs(eps, lam, p, moment, tails)).bound
                    assert exact <= bound + 1e-12

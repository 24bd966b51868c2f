import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from qualifit.errors import DataError
from qualifit.likelihood import (
    chi_squared_nll,
    gaussian_cdf,
    many_category_term,
    observation_probability,
    static_penalty,
    three_category_probabilities,
    total_nll,
    two_category_term,
)
from qualifit.observations import QualitativeObservation, QuantitativePoint, ReducedBinding
from qualifit.synthetic import report_sampling_model
from qualifit.trajectory import Trajectory


def qobs(sigma=0.5, c=4.0, ep=0.01, em=0.01):
    return QualitativeObservation(ReducedBinding("A", 0.0, 1.0, "at", 1.0), c, sigma, ep, em)


def _quad_cdf(mu, sigma, x):
    dens = lambda y: math.exp(-0.5 * ((y - mu) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    val, _ = integrate.quad(dens, -np.inf, x)
    return val


class TestGaussianCdf:
    def test_symmetry_points(self):
        assert gaussian_cdf(0, 1, 0) == 0.5
        assert gaussian_cdf(3, 2, 3) == 0.5

    def test_against_quadrature(self):
        assert abs(gaussian_cdf(0, 1, 1.96) - 0.9750) < 1e-4
        for mu, s, x in [(0, 1, 1.96), (2.0, 0.3, 1.5), (-1, 4, 7), (100, 5, 85)]:
            assert gaussian_cdf(mu, s, x) == pytest.approx(_quad_cdf(mu, s, x), abs=1e-9)

    def test_degenerate_sigma(self):
        assert gaussian_cdf(5, 0, 4) == 0.0
        assert gaussian_cdf(3, 0, 4) == 1.0
        assert gaussian_cdf(4, 0, 4) == 0.5

    def test_vectorized_matches_scalar(self):
        mu = np.array([0.0, 5.0, 4.0, -2.0])
        s = np.array([1.0, 0.0, 0.0, 0.7])
        x = np.array([1.96, 4.0, 4.0, -1.0])
        got = gaussian_cdf(mu, s, x)
        assert got.tolist() == [gaussian_cdf(*a) for a in zip(mu, s, x)]

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            gaussian_cdf(0, -1, 0)

    @given(st.floats(-50, 50), st.floats(1e-3, 50), st.floats(-50, 50))
    def test_translation_scale(self, mu, sigma, x):
        assert gaussian_cdf(mu, sigma, x) == pytest.approx(
            gaussian_cdf(0.0, 1.0, (x - mu) / sigma), abs=1e-12)


class TestChiSquared:
    def pts(self, ys, sigmas):
        return [QuantitativePoint("x", float(i), y, s) for i, (y, s) in enumerate(zip(ys, sigmas))]

    def test_examples(self):
        assert chi_squared_nll(self.pts([1], [0.5]), [1]) == 0.0
        assert chi_squared_nll(self.pts([1], [1]), [0]) == 0.5
        assert chi_squared_nll(self.pts([1, 2], [1, 2]), [0, 4]) == 1.0

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            chi_squared_nll(self.pts([1, 2], [1, 1]), [1])

    def test_nan_prediction_is_inf(self):
        assert chi_squared_nll(self.pts([1], [1]), [float("nan")]) == math.inf

    def test_sigma_must_be_positive(self):
        with pytest.raises(DataError):
            QuantitativePoint("x", 0.0, 1.0, 0.0)


class TestTwoCategory:
    def test_at_threshold(self):
        assert two_category_term(qobs(), 4.0) == pytest.approx(math.log(2), abs=1e-15)

    def test_saturated(self):
        assert two_category_term(qobs(), 4.0 - 10 * 0.5) == pytest.approx(-math.log(0.99), rel=1e-12)
        assert two_category_term(qobs(), 4.0 + 20 * 0.5) == pytest.approx(-math.log(0.01), rel=1e-12)

    def test_zero_eps_zero_probability_is_inf(self):
        assert two_category_term(qobs(sigma=0.0, ep=0, em=0), 5.0) == math.inf
        assert two_category_term(qobs(sigma=0.0, ep=0, em=0), 3.0) == 0.0
        assert two_category_term(qobs(sigma=0.0, ep=0, em=0), 4.0) == pytest.approx(math.log(2))

    def test_nan_prediction_is_inf(self):
        assert two_category_term(qobs(), float("nan")) == math.inf

    def test_asymmetric_rejected(self):
        with pytest.raises(DataError):
            two_category_term(qobs(ep=0.01, em=0.02), 0.0)

    def test_monte_carlo_oracle(self):
        # eps = 0.02, sigma = 1, c = 0, prediction = 1
        rng = np.random.default_rng(7)
        n = 10**6
        reports = report_sampling_model(1.0, 1.0, 0.0, 0.02, 0.02, n, rng)
        freq = reports.mean()
        p = math.exp(-two_category_term(qobs(sigma=1.0, c=0.0, ep=0.02, em=0.02), 1.0))
        assert abs(freq - p) < 3 * math.sqrt(p * (1 - p) / n)

    def test_monotone_sweep(self):
        o = qobs()
        vals = [two_category_term(o, x) for x in np.linspace(-10, 20, 1000)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    @given(st.floats(0, 0.49), st.floats(1e-3, 10), st.floats(-20, 20), st.floats(-60, 60))
    def test_bounds(self, eps, sigma, c, pred):
        t = two_category_term(qobs(sigma, c, eps, eps), pred)
        assert t >= -math.log(1 - eps) - 1e-12
        if eps > 0:
            assert t <= -math.log(eps) + 1e-12


class TestManyCategory:
    def test_floor_and_ceiling(self):
        # floor 0.01, ceiling 0.98: saturated satisfied gives -log(0.98)
        o = qobs(ep=0.01, em=0.02)
        assert many_category_term(o, -100.0) == pytest.approx(-math.log(0.98), rel=1e-13)
        assert many_category_term(o, 100.0) == pytest.approx(-math.log(0.01), rel=1e-13)

    def test_category_panel_plateaus(self):
        # P(a < 100) panel: ``a < 85`` style observation with floor 0.03 and ceiling 0.94
        a = np.linspace(40, 130, 200)
        o = qobs(sigma=5.0, c=85.0, ep=0.03, em=0.06)
        p = np.exp(-np.array([many_category_term(o, x) for x in a]))
        assert p[0] == pytest.approx(0.94, abs=1e-12)
        assert p[-1] == pytest.approx(0.03, abs=1e-12)
        assert np.all(np.diff(p) <= 1e-15)

    def test_symmetric_equals_two_category_bitwise(self):
        grid = [(e, s, c, x) for e in (0.0, 0.01, 0.2, 0.45) for s in (0.0, 0.1, 1.0, 5.0)
                for c in (-3.0, 0.0, 4.0) for x in np.linspace(-30, 30, 209)]
        assert len(grid) >= 10**4
        for e, s, c, x in grid:
            o = qobs(s, c, e, e)
            a, b = many_category_term(o, x), two_category_term(o, x)
            assert a == b or (math.isinf(a) and math.isinf(b))

    @given(st.floats(0, 0.45), st.floats(0, 0.45), st.floats(1e-3, 5), st.floats(-10, 10),
           st.floats(-30, 30))
    def test_direction_symmetry(self, ep, em, sigma, c, pred):
        # "y > c" stored as "-y < -c" equals the swapped-rate complement form
        neg = QualitativeObservation(ReducedBinding("A", 0.0, -1.0, "at", 1.0), -c, sigma, ep, em)
        direct = many_category_term(neg, -pred)
        w = 1 - ep - em
        p = ep + w * stats.norm.sf(c, pred, sigma)
        if p == 0.0:
            assert direct == math.inf
            return
        expected = -math.log(p)
        assert direct == pytest.approx(expected, rel=1e-9, abs=1e-12)

    @given(st.floats(0, 0.45), st.floats(0, 0.45), st.floats(1e-3, 5), st.floats(-60, 60))
    def test_probability_bounds(self, ep, em, sigma, pred):
        p = math.exp(-many_category_term(qobs(sigma, 0.0, ep, em), pred))
        assert ep - 1e-12 <= p <= 1 - em + 1e-12

    def test_log1p_precision(self):
        # tiny NLL far in the satisfied tail keeps full relative precision
        o = qobs(sigma=1.0, c=0.0, ep=0.0, em=0.0)
        t = many_category_term(o, -8.0)
        assert t == pytest.approx(stats.norm.sf(8.0), rel=1e-10)

    def test_many_tiny_terms_monotone(self):
        o = qobs(sigma=1.0, c=0.0, ep=0.0, em=0.0)
        xs = np.linspace(-9, -6, 500)
        vals = [many_category_term(o, x) for x in xs]
        assert all(0 < a < b for a, b in zip(vals, vals[1:]))

    def test_observation_probability_matches(self):
        o = qobs(sigma=0.7, c=1.0, ep=0.05, em=0.1)
        for x in (-1.0, 0.5, 1.0, 2.5):
            p = observation_probability(x, 0.7, 1.0, 0.05, 0.1)
            assert many_category_term(o, x) == pytest.approx(-math.log(p), rel=1e-12)


class TestKernels:
    def test_backends_agree(self, kernels, rng):
        from qualifit._kernels import _numpy
        pred = np.concatenate([rng.normal(0, 3, 500), [np.nan, 50.0, -50.0]])
        n = pred.size
        sigma = np.concatenate([rng.uniform(0, 2, n - 3), [1.0, 0.0, 0.0]])
        c = rng.normal(0, 1, n)
        ep = rng.uniform(0, 0.3, n)
        em = rng.uniform(0, 0.3, n)
        ep[:20] = em[:20] = 0.0
        a = kernels.qual_terms(pred, sigma, c, ep, em)
        b = _numpy.qual_terms(pred, sigma, c, ep, em)
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=0)
        assert kernels.qual_nll(pred[:-3], sigma[:-3], c[:-3], ep[:-3], em[:-3]) == pytest.approx(
            float(np.sum(b[:-3])), rel=1e-12)

    def test_nan_and_inf(self, kernels):
        one = np.ones(1)
        assert kernels.qual_terms(np.array([np.nan]), one, one * 0, one * 0.1, one * 0.1)[0] == np.inf
        assert kernels.qual_terms(np.array([5.0]), one * 0, one * 4, one * 0, one * 0)[0] == np.inf
        assert kernels.chi2_nll(one, np.array([np.nan]), one) == np.inf

    def test_chi2(self, kernels):
        y = np.array([1.0, 2.0])
        assert kernels.chi2_nll(y, np.array([0.0, 4.0]), np.array([1.0, 2.0])) == 1.0


class TestStaticPenalty:
    def test_examples(self):
        assert static_penalty([(-1, 2)]) == 0.0
        assert static_penalty([(3, 2)]) == 6.0
        a1 = 5.0
        assert static_penalty([(a1 - 4, 2)]) == 2.0

    @given(st.lists(st.tuples(st.floats(-100, 100), st.floats(0, 100)), max_size=20))
    def test_zero_iff_all_satisfied(self, items):
        val = static_penalty(items)
        assert val >= 0
        if all(g <= 0 or w == 0 for g, w in items):
            assert val == 0
        elif all(w > 0 for _, w in items):
            # a violated term vanishes only when w * g underflows
            assert (val == 0) == all(g <= 0 or w * g == 0 for g, w in items)

    def test_negative_weight(self):
        with pytest.raises(DataError):
            static_penalty([(1, -1)])


class TestThreeCategory:
    def test_plateaus(self):
        a = np.linspace(40, 160, 1201)
        lo, mid, up = three_category_probabilities(a, 5.0, 85.0, 115.0, 0.03, 0.06)
        assert lo[0] == pytest.approx(0.94, abs=1e-6) and up[-1] == pytest.approx(0.94, abs=1e-6)
        assert mid[600] == pytest.approx(0.03 + 0.91 * stats.norm.cdf(3.0) ** 2, abs=1e-12)
        assert lo[-1] == pytest.approx(0.03, abs=1e-12) and up[0] == pytest.approx(0.03, abs=1e-12)

    def test_surplus_formula(self):
        # sum - 1 equals w * cdf_high * (1 - cdf_low) - w * cdf_high ... written out exactly
        for mu in (80.0, 100.0, 112.0):
            lo, mid, up = three_category_probabilities(mu, 5.0, 85.0, 115.0, 0.03, 0.06)
            cl, ch = gaussian_cdf(mu, 5.0, 85.0), gaussian_cdf(mu, 5.0, 115.0)
            assert lo + mid + up - 1 == pytest.approx(0.91 * cl * (1 - ch), abs=1e-15)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(0.1, 10), st.floats(-50, 50), st.floats(6, 20), st.floats(-1, 1),
           st.floats(0, 0.3))
    def test_near_normalization(self, sigma, c_low, gap, where, eps):
        # separated thresholds (gap >= 6 sigma): total within [1, 1 + 1e-8]
        c_high = c_low + gap * sigma
        mu = 0.5 * (c_low + c_high) + where * gap * sigma
        lo, mid, up = three_category_probabilities(mu, sigma, c_low, c_high, eps, eps)
        total = lo + mid + up
        assert 1 - 1e-15 <= total <= 1 + 1e-8

    def test_sum_at_least_one(self):
        a = np.linspace(0, 200, 2001)
        lo, mid, up = three_category_probabilities(a, 5.0, 85.0, 115.0, 0.03, 0.06)
        assert np.all(lo + mid + up >= 1 - 1e-15)


class TestTotalNll:
    def traj(self):
        t = np.linspace(0, 2, 3)
        return Trajectory(t, ("A", "B"), np.array([[4.0, 4.0, 4.0], [0.0, 1.0, 2.0]]))

    def test_empty(self):
        assert total_nll([], [], self.traj()) == 0.0

    def test_additivity(self):
        quant = [QuantitativePoint("B", 1.0, 1.0, 0.3)]
        qual = [qobs(sigma=0.5, c=4.0, ep=0.0, em=0.0)]
        assert total_nll(quant, qual, self.traj()) == pytest.approx(math.log(2), abs=1e-15)
        assert total_nll(quant, [], self.traj()) == 0.0
        assert total_nll([], qual, self.traj()) == pytest.approx(math.log(2))

    def test_missing_observable(self):
        quant = [QuantitativePoint("C", 1.0, 1.0, 0.3)]
        with pytest.raises(DataError, match="'C'"):
            total_nll(quant, [], self.traj())

    def test_failed_or_nan_gives_inf(self):
        tr = self.traj()
        failed = Trajectory(tr.times, tr.names, tr.values, failed=True)
        qual = [qobs()]
        assert total_nll([], qual, failed) == math.inf
        vals = tr.values.copy()
        vals[0, 1] = np.nan
        nan = Trajectory(tr.times, tr.names, vals, failed=True, check=False)
        nan.failed = False
        assert total_nll([], qual, nan) == math.inf

    def test_time_outside_range(self):
        qual = [QualitativeObservation(ReducedBinding("A", 0.0, 1.0, "at", 5.0), 4.0, 0.5, 0.01, 0.01)]
        with pytest.raises(DataError, match="outside"):
            total_nll([], qual, self.traj())

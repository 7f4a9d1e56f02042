"""Tests for the normal-kernel module.

Expected values below were frozen from independent oracles that also run
inside this file: a bisection inverse built on the cdf alone, quadrature of
x^2 phi and x^4 phi for the truncated moments, scipy's bivariate cdf (a
different algorithm from the package's rho-integral), Monte Carlo tails,
and central finite differences for the rho-derivative.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.integrate import quad
from scipy.stats import multivariate_normal

from hcmt import (
    MtMomentParams,
    RangeError,
    biv_cdf,
    hc_lambda_from_alpha,
    mt_lambda_from_alpha,
    mt_variance_peak,
    mu0_mt,
    pi0,
    psi_density,
    psi_tail,
    sigma0_sq_hc,
    sigma0_sq_mt,
    std_cdf,
    std_pdf,
    std_quantile,
)


def bisect_quantile(u, steps=200):
    """Inverse cdf oracle that only trusts std_cdf."""
    lo, hi = -12.0, 12.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if std_cdf(mid) < u:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestUnivariate:
    def test_pdf_at_zero(self):
        assert_allclose(std_pdf(0.0), 1.0 / math.sqrt(2.0 * math.pi), rtol=1e-15)

    def test_pdf_integrates_to_one(self):
        total, _ = quad(std_pdf, -9.0, 9.0)
        assert_allclose(total, 1.0, atol=1e-12)

    def test_cdf_symmetry(self):
        x = np.linspace(-6.0, 6.0, 41)
        assert_allclose(std_cdf(x) + std_cdf(-x), np.ones_like(x), atol=1e-15)

    def test_quantile_against_bisection_oracle(self):
        # frozen: bisection on the cdf gives 1.959963984540054 at u = 0.975
        assert_allclose(bisect_quantile(0.975), 1.959963984540054, atol=1e-12)
        assert_allclose(std_quantile(0.975), 1.959963984540054, atol=1e-13)
        for u in (1e-10, 1e-4, 0.2, 0.5, 0.8, 1 - 1e-6):
            assert_allclose(std_quantile(u), bisect_quantile(u), atol=1e-11)

    @given(st.floats(min_value=1e-8, max_value=1 - 1e-8))
    @settings(max_examples=200, deadline=None)
    def test_quantile_round_trip(self, u):
        assert std_cdf(std_quantile(u)) == pytest.approx(u, abs=1e-12)

    def test_quantile_domain(self):
        for bad in (0.0, 1.0, -0.5, 2.0):
            with pytest.raises(RangeError):
                std_quantile(bad)

    def test_vectorized_shapes(self):
        x = np.linspace(-2, 2, 7)
        assert std_pdf(x).shape == x.shape
        assert std_cdf(x).shape == x.shape
        assert isinstance(std_cdf(0.3), float)


class TestTwoSidedTail:
    def test_endpoints_and_frozen_value(self):
        assert pi0(0.0) == pytest.approx(1.0, abs=1e-15)
        # frozen: 2 * (1 - Phi(1))
        assert_allclose(pi0(1.0), 0.31731050786291415, rtol=1e-14)
        assert_allclose(sigma0_sq_hc(1.0), 0.21662454946269363, rtol=1e-13)

    def test_monotone_decreasing(self):
        lam = np.linspace(0.0, 8.0, 200)
        tails = pi0(lam)
        assert np.all(np.diff(tails) < 0)

    def test_negative_threshold_rejected(self):
        with pytest.raises(RangeError):
            pi0(-0.1)

    def test_inversion_round_trip(self):
        for alpha in (1e-12, 1e-6, 0.01, 0.05, 0.5, 0.99):
            lam = hc_lambda_from_alpha(alpha)
            assert pi0(lam) == pytest.approx(alpha, rel=1e-10)

    def test_known_threshold(self):
        assert_allclose(hc_lambda_from_alpha(0.05), 1.959963984540054, atol=1e-12)

    def test_level_domain(self):
        for bad in (0.0, 1.0, -0.2):
            with pytest.raises(RangeError):
                hc_lambda_from_alpha(bad)


def quad_mu0(lam, m):
    val, _ = quad(lambda x: x * x * std_pdf(x), lam, m)
    return 2.0 * val


def quad_var(lam, m):
    fourth, _ = quad(lambda x: x**4 * std_pdf(x), lam, m)
    return 2.0 * fourth - quad_mu0(lam, m) ** 2


class TestTruncatedMoments:
    def test_closed_form_matches_quadrature(self):
        for lam, m in [(0.0, 1.0), (0.5, 2.0), (1.0, 3.0), (2.0, 4.5), (3.0, 3.5)]:
            params = MtMomentParams(lam, m)
            assert_allclose(mu0_mt(params), quad_mu0(lam, m), rtol=1e-10)
            assert_allclose(sigma0_sq_mt(params), quad_var(lam, m), rtol=1e-9)

    def test_frozen_values(self):
        # frozen against the quadrature oracle above
        assert_allclose(mu0_mt(MtMomentParams(1.0, 2.0)), 0.5397878269520902, rtol=1e-13)
        assert_allclose(sigma0_sq_mt(MtMomentParams(1.0, 3.0)), 1.964580951731469, rtol=1e-13)

    def test_window_validation(self):
        with pytest.raises(RangeError):
            MtMomentParams(-0.5, 2.0)
        with pytest.raises(RangeError):
            MtMomentParams(2.0, 2.0)
        with pytest.raises(RangeError):
            MtMomentParams(1.0, -1.0)

    def test_array_thresholds(self):
        lam = np.array([0.0, 1.0, 2.0])
        params = MtMomentParams(lam, 3.0)
        assert mu0_mt(params).shape == (3,)
        assert np.all(sigma0_sq_mt(params) > 0)

    def test_peak_solves_stationarity(self):
        for m in (2.0, 3.0, 4.291932052578694):
            star = mt_variance_peak(m)
            assert 0 < star < m
            assert star**2 == pytest.approx(2.0 * mu0_mt(MtMomentParams(star, m)), abs=1e-10)
            # variance really is maximal there
            eps = 1e-4
            s = sigma0_sq_mt(MtMomentParams(np.array([star - eps, star, star + eps]), m))
            assert s[1] >= s[0] and s[1] >= s[2]

    def test_level_inversion_round_trip(self):
        m = math.sqrt(2 * math.log(1e4))
        for alpha in (1e-4, 1e-3, 0.01, 0.1, 0.5, 1.0):
            lam = mt_lambda_from_alpha(alpha, m)
            got = sigma0_sq_mt(MtMomentParams(lam, m))
            assert abs(got - alpha) < 1e-12 * alpha
            assert mt_variance_peak(m) <= lam < m

    def test_level_inversion_is_monotone(self):
        m = 4.0
        lams = [mt_lambda_from_alpha(a, m) for a in (0.5, 0.1, 0.01, 1e-4)]
        assert lams == sorted(lams)

    def test_unattainable_level_names_interval(self):
        m = 3.0
        peak = sigma0_sq_mt(MtMomentParams(mt_variance_peak(m), m))
        with pytest.raises(RangeError, match="attainable"):
            mt_lambda_from_alpha(peak * 1.01, m)
        with pytest.raises(RangeError):
            mt_lambda_from_alpha(0.0, m)


class TestBivariate:
    def test_zero_correlation_factorizes(self):
        for x, y in [(0.0, 0.0), (-1.0, 2.0), (1.3, -0.4)]:
            assert_allclose(biv_cdf(x, y, 0.0), std_cdf(x) * std_cdf(y), rtol=1e-14)

    def test_orthant_identity(self):
        # frozen: 1/4 + arcsin(rho) / (2 pi) at rho = 0.3
        assert_allclose(biv_cdf(0.0, 0.0, 0.3), 0.29849334201033917, atol=1e-10)
        for rho in (-0.9, -0.4, 0.25, 0.8):
            expect = 0.25 + math.asin(rho) / (2.0 * math.pi)
            assert_allclose(biv_cdf(0.0, 0.0, rho), expect, atol=1e-10)

    def test_against_scipy_route(self):
        pts = [(-1.0, -1.5), (0.3, 0.7), (-2.0, 1.0), (1.5, 1.5)]
        for rho in (-0.75, -0.3, 0.2, 0.6, 0.95):
            cov = [[1.0, rho], [rho, 1.0]]
            ref = multivariate_normal(mean=[0.0, 0.0], cov=cov)
            for x, y in pts:
                assert_allclose(biv_cdf(x, y, rho), ref.cdf([x, y]), atol=2e-8)

    def test_argument_symmetry(self):
        assert biv_cdf(0.7, -1.1, 0.45) == pytest.approx(biv_cdf(-1.1, 0.7, 0.45), abs=1e-14)

    def test_correlation_domain(self):
        for bad in (1.0, -1.0, 1.5):
            with pytest.raises(RangeError):
                biv_cdf(0.0, 0.0, bad)

    def test_tail_factorizes_at_independence(self):
        for lam, nu in [(0.5, 0.5), (1.0, 1.5), (2.0, 0.3)]:
            assert_allclose(psi_tail(lam, nu, 0.0), pi0(lam) * pi0(nu), rtol=1e-12)

    def test_tail_frozen_value(self):
        # frozen against scipy's bivariate cdf combination
        assert_allclose(psi_tail(1.0, 1.5, 0.3), 0.050951094433433236, atol=1e-9)

    def test_tail_at_zero_thresholds_is_one(self):
        for rho in (-0.8, 0.0, 0.5):
            assert psi_tail(0.0, 0.0, rho) == pytest.approx(1.0, abs=1e-10)

    def test_tail_monte_carlo_route(self):
        rng = np.random.default_rng(20240817)
        rho, lam, nu = 0.6, 1.0, 1.2
        chol = np.linalg.cholesky([[1.0, rho], [rho, 1.0]])
        z = rng.standard_normal((2_000_000, 2)) @ chol.T
        hit = np.mean((np.abs(z[:, 0]) >= lam) & (np.abs(z[:, 1]) >= nu))
        assert psi_tail(lam, nu, rho) == pytest.approx(hit, abs=1.2e-3)

    def test_density_is_tail_derivative(self):
        h = 1e-5
        for lam, nu in [(0.0, 0.0), (1.0, 1.5), (0.5, 2.0)]:
            for rho in (-0.6, -0.2, 0.1, 0.45, 0.8):
                numeric = (psi_tail(lam, nu, rho + h) - psi_tail(lam, nu, rho - h)) / (2 * h)
                assert psi_density(lam, nu, rho) == pytest.approx(numeric, abs=1e-6)

    def test_density_vanishes_at_origin_thresholds(self):
        for rho in (-0.7, 0.0, 0.3, 0.9):
            assert psi_density(0.0, 0.0, rho) == pytest.approx(0.0, abs=1e-15)

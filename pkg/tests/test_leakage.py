from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest

from leakscope import specfun
from leakscope.channel import (
    BeamformingScheme,
    FadingModel,
    RayleighANEve,
    RayleighMRTEve,
    RicianANGammaFit,
    RicianMRTBound,
    SystemParams,
    build_eve_distribution,
)
from leakscope.leakage import (
    LOG2E_SQ,
    FblOperatingPoint,
    LeakageEstimate,
    Method,
    ail_closed_form,
    ail_exact,
    ail_highsnr,
    ail_mc,
    ail_rayleigh_an,
    ail_rayleigh_mrt,
    ail_rician_mrt,
    ail_saddlepoint,
    dispersion,
    fbl_secrecy_rate,
    instant_leakage,
    laplace_internals_check,
    r0,
    r0_highsnr,
    sop,
    x0,
)

from conftest import philox

# Direct evaluations at 40 digits with mpmath.
FBL_RATE_DEFAULT = 0.5911168360677256248
R0_DEFAULT = 0.4658347208458604369
X0_DEFAULT = 1.896208123407212073
LEAK_AT_HALF = 4.714069952332020203e-70
R0_INF_DEFAULT = 0.4729131411651584722

DEFAULT = FblOperatingPoint(3.0, 400, 100, 1e-3)


def mp_ail_rayleigh_an(point, gamma_e_bar, alpha, k):
    """AIL of the defining integral in extended precision."""
    mp.mp.dps = 30
    gb, n = mp.mpf(point.gamma_b), mp.mpf(point.n)
    qi = mp.sqrt(2) * mp.erfinv(1 - 2 * mp.mpf(point.epsilon))
    ln2 = mp.log(2)

    def V(g):
        return g * (g + 2) / (g + 1) ** 2 / ln2 ** 2

    R0 = mp.sqrt(V(gb) / n) * qi + mp.mpf(point.m) / n
    a, ge = mp.mpf(alpha), mp.mpf(gamma_e_bar)

    def pdf(x):
        tau = 1 + x * (1 - a) / (a * (k - 1))
        return mp.exp(-x / (a * ge)) / tau ** k * (tau / (a * ge) + (1 - a) / a)

    def f(x):
        arg = mp.sqrt(n / V(x)) * (mp.log(1 + gb, 2) - mp.log(1 + x, 2) - R0)
        return mp.erfc(arg / mp.sqrt(2)) / 2 * pdf(x)

    x_0 = (1 + gb) / 2 ** R0 - 1
    inner = [x_0 / 2, x_0, 2 * x_0 + 1] if x_0 > 0 else []
    pts = [0] + inner + [10 * (abs(x_0) + ge), mp.inf]
    return float(mp.re(mp.quad(f, sorted(pts))))


class TestRatePieces:
    def test_dispersion(self):
        assert dispersion(0.0) == 0.0
        assert dispersion(1e12) == pytest.approx(LOG2E_SQ, rel=1e-10)
        assert dispersion(3.0) == pytest.approx(LOG2E_SQ * 15 / 16, rel=1e-15)
        assert LOG2E_SQ == pytest.approx(2.0813689810056077)

    def test_secrecy_rate(self):
        assert fbl_secrecy_rate(3.0, 1.0, 400, 1e-3, 1e-3) == pytest.approx(FBL_RATE_DEFAULT, rel=1e-13)
        assert fbl_secrecy_rate(5.0, 5.0, 100, 0.5, 0.5) == 0.0
        assert fbl_secrecy_rate(3.0, 0.0, 10 ** 12, 1e-3, 0.3) == pytest.approx(2.0, abs=1e-4)

    def test_r0(self):
        assert r0(FblOperatingPoint(3.0, 400, 100, 0.5)) == pytest.approx(0.25)
        assert r0(FblOperatingPoint(0.0, 400, 100, 1e-3)) == pytest.approx(0.25)
        assert r0(DEFAULT) == pytest.approx(R0_DEFAULT, rel=1e-13)

    def test_x0(self):
        assert x0(DEFAULT) == pytest.approx(X0_DEFAULT, rel=1e-13)
        assert x0(FblOperatingPoint(0.0, 400, 100, 1e-3)) < 0

    def test_instant_leakage(self):
        gb = 3.0
        p = FblOperatingPoint(gb, 400, 100, 1e-3)
        assert instant_leakage(p, x0(p)) == pytest.approx(0.5, abs=1e-12)
        assert instant_leakage(p, 1e12) == pytest.approx(1.0)
        assert instant_leakage(p, 0.5) == pytest.approx(LEAK_AT_HALF, rel=1e-10)

    def test_operating_point_validation(self):
        with pytest.raises(ValueError):
            FblOperatingPoint(-1.0, 100, 10, 0.1)
        with pytest.raises(ValueError):
            FblOperatingPoint(1.0, 100, 10, 1.0)


class TestExact:
    def test_bad_bracket_means_large_leakage(self):
        p = FblOperatingPoint(0.5, 100, 200, 1e-3)
        assert x0(p) < 0
        assert ail_exact(p, RayleighMRTEve(1.0)).value >= 0.5

    @pytest.mark.parametrize("rho_db, n", [(-10, 100), (0, 400), (10, 1000), (20, 300)])
    def test_against_extended_precision(self, rho_db, n):
        rho = 10 ** (rho_db / 10)
        p = FblOperatingPoint(0.7 * 3 * rho, n, 100, 1e-3)
        d = RayleighANEve(rho, 0.7, 4)
        ref = mp_ail_rayleigh_an(p, rho, 0.7, 4)
        assert ail_exact(p, d).value == pytest.approx(ref, rel=1e-6)

    def test_mc_agreement_at_defaults(self):
        params = SystemParams()
        d = build_eve_distribution(params)
        p = FblOperatingPoint(params.gamma_b, params.n, params.m, params.epsilon)
        mc = ail_mc(p, d, 100_000, philox(11, 1))
        assert abs(ail_exact(p, d).value - mc.value) <= 3 * mc.std_error

    def test_needs_density(self):
        from leakscope.channel import NoPdfError

        with pytest.raises(NoPdfError):
            ail_exact(DEFAULT, RicianMRTBound(1.0, 5.0, 4))

    def test_reports_error_metadata(self):
        est = ail_exact(DEFAULT, RayleighMRTEve(1.0))
        assert est.method is Method.EXACT_QUADRATURE
        assert est.quad_error is not None and est.std_error is None


class TestMonteCarlo:
    def test_degenerate_zero(self):
        est = ail_mc(DEFAULT, lambda rng, n: np.zeros(n), 1000, philox(12, 1))
        assert est.value == 0.0 and est.std_error == 0.0

    def test_degenerate_constant(self):
        g = 1.7
        est = ail_mc(DEFAULT, lambda rng, n: np.full(n, g), 1000, philox(12, 2))
        assert est.value == pytest.approx(float(instant_leakage(DEFAULT, g)))

    def test_minimum_samples(self):
        with pytest.raises(ValueError):
            ail_mc(DEFAULT, RayleighMRTEve(1.0), 10, philox(12, 3))

    def test_estimate_validation(self):
        with pytest.raises(ValueError):
            LeakageEstimate(1.5, Method.SADDLE_POINT)
        with pytest.raises(ValueError):
            LeakageEstimate(0.1, Method.SADDLE_POINT, std_error=0.1)


class TestSaddlePoint:
    def test_negative_x0(self):
        p = FblOperatingPoint(0.1, 100, 100, 1e-3)
        assert ail_saddlepoint(p, RayleighMRTEve(1.0)).value == 1.0

    def test_vanishes_for_large_x0(self):
        p = FblOperatingPoint(1e6, 1000, 10, 0.1)
        assert ail_saddlepoint(p, RayleighMRTEve(1.0)).value == 0.0

    def test_exponential_tail(self):
        g = 2.0
        # Pick gamma_e_bar equal to x0 so the tail is exp(-1).
        d = RayleighMRTEve(x0(DEFAULT))
        assert ail_saddlepoint(DEFAULT, d).value == pytest.approx(math.exp(-1), rel=1e-14)


def _branch_dists(rng):
    ge = float(10 ** rng.uniform(-1, 2))
    shape = float(rng.uniform(0.5, 8))
    return [RayleighANEve(ge, float(rng.uniform(0.05, 0.99)), int(rng.integers(2, 9))),
            RayleighMRTEve(ge),
            RicianANGammaFit(shape, ge / shape),
            RicianMRTBound(ge, float(rng.uniform(0, 10)), int(rng.integers(1, 9)))]


def _random_point(rng):
    return FblOperatingPoint(float(10 ** rng.uniform(-1, 3)), int(rng.integers(50, 2001)),
                             float(rng.integers(1, 300)), float(10 ** rng.uniform(-6, -0.5)))


class TestClosedForms:
    def test_identity_with_saddle_point(self):
        rng = philox(13, 1)
        worst = 0.0
        for _ in range(250):
            p = _random_point(rng)
            for d in _branch_dists(rng):
                worst = max(worst, abs(ail_closed_form(p, d).value - ail_saddlepoint(p, d).value))
        assert worst <= 1e-12

    def test_an_tends_to_mrt(self):
        for x in (0.1, 1.0, 10.0):
            assert ail_rayleigh_an(x, 2.0, 1 - 1e-12, 4) == pytest.approx(ail_rayleigh_mrt(x, 2.0), rel=1e-9)

    def test_marcum_branch_at_origin(self):
        assert ail_rician_mrt(0.0, 1.0, 5.0, 4) == 1.0


class TestSop:
    def test_matches_saddle_point(self):
        rng = philox(14, 1)
        for _ in range(200):
            p = _random_point(rng)
            d = _branch_dists(rng)[int(rng.integers(0, 4))]
            re = math.log2(1 + x0(p)) if x0(p) > -1 else -1.0
            if x0(p) > 0:
                assert sop(re, d) == pytest.approx(ail_saddlepoint(p, d).value, abs=1e-14)

    def test_limits(self):
        d = RayleighMRTEve(1.0)
        assert sop(0.0, d) == 1.0
        assert sop(1e6, d) == 0.0


class TestHighSnr:
    def test_r0_limits(self):
        assert r0_highsnr(400, 100, 0.5) == pytest.approx(0.25)
        assert r0_highsnr(1e12, 100, 1e-3) == pytest.approx(0.0, abs=1e-5)
        assert r0_highsnr(400, 100, 1e-3) == pytest.approx(R0_INF_DEFAULT, rel=1e-13)

    def _pair(self, rho, scheme):
        params = SystemParams(rho=rho, scheme=scheme)
        d = build_eve_distribution(params)
        p = FblOperatingPoint(params.gamma_b, params.n, params.m, params.epsilon)
        return d, p, params

    def test_an_vanishes_mrt_saturates(self):
        an = []
        for r in (20, 40, 60):
            d, _, params = self._pair(10 ** (r / 10), BeamformingScheme(0.7))
            an.append(ail_highsnr(d, params.gamma_b, 400, 100, 1e-3).value)
        # Algebraic decay: each 20 dB step divides the value by about 1e6 (k = 4).
        assert an[0] > 1e5 * an[1] > 1e10 * an[2]
        mrt = [ail_highsnr(RayleighMRTEve(10 ** (r / 10)), 3 * 10 ** (r / 10), 400, 100, 1e-3).value
               for r in (40, 60, 80)]
        assert mrt[2] == pytest.approx(mrt[1], rel=1e-3) and mrt[2] > 0.1

    @pytest.mark.parametrize("scheme", [BeamformingScheme(0.7), BeamformingScheme.mrt()])
    def test_close_to_closed_form_at_20db(self, scheme):
        d, p, params = self._pair(100.0, scheme)
        hs = ail_highsnr(d, params.gamma_b, p.n, p.m, p.epsilon).value
        full = ail_closed_form(p, d).value
        assert abs(hs - full) <= 0.5 * full


class TestLaplace:
    def test_internals(self):
        rng = philox(15, 1)
        checked = 0
        while checked < 40:
            p = _random_point(rng)
            if x0(p) <= 1e-3:
                continue
            d = _branch_dists(rng)[int(rng.integers(0, 3))]
            diag = laplace_internals_check(p, d)
            assert diag.xi == pytest.approx(0.0, abs=1e-20)
            assert diag.xi_dd_printed == pytest.approx(2 / (diag.x0 * (diag.x0 + 2)), rel=1e-14)
            assert diag.xi_dd_numeric == pytest.approx(diag.xi_dd_exact, rel=1e-4)
            assert diag.product == pytest.approx(diag.tail, rel=1e-10, abs=1e-300)
            assert diag.product_printed == pytest.approx(diag.tail, rel=1e-10, abs=1e-300)
            checked += 1

    def test_requires_positive_x0(self):
        with pytest.raises(specfun.DomainError):
            laplace_internals_check(FblOperatingPoint(0.1, 100, 100, 1e-3), RayleighMRTEve(1.0))


class TestMonotonicity:
    def test_decreasing_in_epsilon_and_n(self):
        d = RayleighANEve(1.0, 0.3, 4)
        eps = np.geomspace(1e-5, 0.4, 15)
        vals = [ail_saddlepoint(FblOperatingPoint(0.9, 300, 100, e), d).value for e in eps]
        assert np.all(np.diff(vals) < 0)
        ns = np.arange(200, 1001, 100)
        vals = [ail_saddlepoint(FblOperatingPoint(0.9, int(n), 100, 1e-3), d).value for n in ns]
        assert np.all(np.diff(vals) < 0)

"""Finite-blocklength secrecy metrics and average information leakage.

The leakage ``delta`` of a wiretap code sending ``m`` bits in ``n`` channel
uses, with Bob's error probability fixed at ``epsilon``, follows from the
normal approximation of the secrecy rate. Averaging it over Eve's SNR
gives the average information leakage (AIL). Four estimators are
provided: quadrature of the defining integral, Monte Carlo, the
saddle-point approximation ``1 - F(x0)`` (and its per-branch closed forms),
and high-SNR asymptotes.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate

from . import specfun
from .channel import (
    EveSnrDistribution,
    NoPdfError,
    RayleighANEve,
    RayleighMRTEve,
    RicianANGammaFit,
    RicianMRTBound,
)

LOG2E = math.log2(math.e)
LOG2E_SQ = LOG2E * LOG2E
_LN2 = math.log(2.0)

__all__ = [
    "Method",
    "LeakageEstimate",
    "FblOperatingPoint",
    "dispersion",
    "secrecy_capacity",
    "fbl_secrecy_rate",
    "r0",
    "x0",
    "instant_leakage",
    "ail_exact",
    "ail_mc",
    "ail_saddlepoint",
    "ail_closed_form",
    "sop",
    "r0_highsnr",
    "x0_highsnr",
    "ail_highsnr",
    "laplace_internals_check",
]


class Method(str, enum.Enum):
    EXACT_QUADRATURE = "exact-quadrature"
    SADDLE_POINT = "saddle-point"
    CLOSED_FORM = "closed-form"
    MONTE_CARLO = "monte-carlo"
    HIGH_SNR = "high-snr"


@dataclass(frozen=True)
class LeakageEstimate:
    value: float
    method: Method
    std_error: Optional[float] = None
    quad_error: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"leakage must lie in [0, 1], got {self.value}")
        if (self.std_error is not None) != (self.method is Method.MONTE_CARLO):
            raise ValueError("std_error is carried by Monte Carlo estimates only")

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class FblOperatingPoint:
    """Bob's SNR, blocklength, payload bits and target error probability.

    ``n`` is normally an integer; real values are accepted because the
    relaxed design inverts the leakage over a continuous blocklength.
    """

    gamma_b: float
    n: float
    m: float
    epsilon: float

    def __post_init__(self):
        if not self.gamma_b >= 0:
            raise ValueError(f"gamma_b must be nonnegative, got {self.gamma_b}")
        if not self.n > 0:
            raise ValueError(f"blocklength must be positive, got {self.n}")
        if not self.m >= 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    @property
    def rate(self) -> float:
        return self.m / self.n


# ------------------------------------------------------------ rate pieces

def dispersion(gamma):
    """Channel dispersion ``log2(e)**2 * g (g + 2) / (g + 1)**2`` (bits^2)."""
    g = np.asarray(gamma, dtype=float)
    out = LOG2E_SQ * g * (g + 2.0) / (g + 1.0) ** 2
    return float(out) if out.ndim == 0 else out


def secrecy_capacity(gamma_b, gamma_e):
    return np.log2(1.0 + np.asarray(gamma_b, dtype=float)) - np.log2(1.0 + np.asarray(gamma_e, dtype=float))


def fbl_secrecy_rate(gamma_b, gamma_e, n, epsilon, delta) -> float:
    """Normal-approximation secrecy rate ``[C_s - sqrt(V_b/n) Q^-1(eps) - sqrt(V_e/n) Q^-1(delta)]^+``."""
    if not n >= 1:
        raise ValueError("n must be >= 1")
    cs = float(secrecy_capacity(gamma_b, gamma_e))
    pen_b = math.sqrt(dispersion(gamma_b) / n) * specfun.gaussian_q_inv(epsilon)
    pen_e = math.sqrt(dispersion(gamma_e) / n) * specfun.gaussian_q_inv(delta)
    return max(cs - pen_b - pen_e, 0.0)


def _r0(gamma_b, n, m, q_inv_eps):
    return np.sqrt(dispersion(gamma_b) / n) * q_inv_eps + m / n


def _x0(gamma_b, n, m, q_inv_eps):
    # (1 + gb) / 2**R0 - 1 evaluated from the rate gap, the same way the
    # SOP threshold 2**R_e - 1 is formed; no overflow for huge R0.
    gap = np.log2(1.0 + np.asarray(gamma_b, dtype=float)) - _r0(gamma_b, n, m, q_inv_eps)
    return np.expm1(gap * _LN2)


def r0(point: FblOperatingPoint) -> float:
    """Required rate ``sqrt(V_b/n) Q^-1(eps) + m/n``.

    For ``eps > 0.5`` the first term is negative and is kept as is.
    """
    return float(_r0(point.gamma_b, point.n, point.m, specfun.gaussian_q_inv(point.epsilon)))


def x0(point: FblOperatingPoint) -> float:
    """Eve SNR at which the leakage argument changes sign; may be negative."""
    return float(_x0(point.gamma_b, point.n, point.m, specfun.gaussian_q_inv(point.epsilon)))


def _leak_argument(gamma_e, gamma_b, n, r0_value):
    # sqrt(n / V_e) * [log2((1+gb)/(1+ge)) - R0], with the V_e = 0 limit.
    ge = np.asarray(gamma_e, dtype=float)
    bracket = np.log2(1.0 + gamma_b) - np.log2(1.0 + ge) - r0_value
    ve = dispersion(ge)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = np.sqrt(n / ve) * bracket
    limit = np.where(bracket > 0, np.inf, np.where(bracket < 0, -np.inf, 0.0))
    return np.where(ve > 0, arg, limit)


def instant_leakage(point: FblOperatingPoint, gamma_e):
    """Leakage ``delta`` for one realization of Eve's SNR.

    At ``gamma_e = 0`` the dispersion vanishes and the value is the limit
    0, 1/2 or 1 according to the sign of the bracket.
    """
    r = r0(point)
    out = specfun.gaussian_q(_leak_argument(gamma_e, point.gamma_b, point.n, r))
    return out


# ---------------------------------------------------------------- AIL

def ail_exact(point: FblOperatingPoint, dist: EveSnrDistribution,
              abs_tol: float = 1e-10) -> LeakageEstimate:
    """AIL by adaptive Gauss-Kronrod quadrature of the defining integral.

    The half line is mapped onto [0, 1) by ``x = s t / (1 - t)``, with ``s``
    the mean of Eve's SNR, and split around the image of ``x0`` where the
    integrand drops from near 1 to near 0.
    Small results are refined to relative accuracy.
    """
    if not dist.has_pdf:
        raise NoPdfError(f"{dist.branch} has no density; use ail_mc")
    r = r0(point)
    gb, n = point.gamma_b, point.n

    x_split = x0(point)
    try:
        scale = max(1.0, float(dist.mean()))
    except NotImplementedError:
        scale = 1.0

    def integrand(t, sign):
        # sign = +1 integrates Q(arg) f, sign = -1 the complement Q(-arg) f.
        if t >= 1.0:
            return 0.0
        x = scale * t / (1.0 - t)
        dens = float(dist.pdf(x))
        if dens == 0.0:
            return 0.0
        q = float(specfun.gaussian_q(sign * _leak_argument(x, gb, n, r)))
        return q * dens * scale / (1.0 - t) ** 2

    pts = None
    if x_split > 0:
        # Transition width of the smoothed step around x0.
        width = (1.0 + x_split) * math.log(2.0) * math.sqrt(dispersion(x_split) / n)
        xs = [x_split + c * width for c in (-8.0, -2.0, 0.0, 2.0, 8.0)]
        pts = sorted({x / (x + scale) for x in xs if x > 0})

    def run(eps_abs, sign):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            return integrate.quad(integrand, 0.0, 1.0, args=(sign,), points=pts,
                                  epsabs=eps_abs, epsrel=1e-10, limit=400)

    value, err = run(abs_tol, 1.0)
    if value > 0.5:
        # Near-certain leakage: the complement carries the precision.
        comp, err = run(abs_tol, -1.0)
        if 0.0 < comp < 1e-4:
            comp, err = run(max(comp * 1e-8, 1e-300), -1.0)
        value = 1.0 - comp
    elif 0.0 < value < 1e-4:
        value, err = run(max(value * 1e-8, 1e-300), 1.0)
    value = min(max(value, 0.0), 1.0)
    return LeakageEstimate(value, Method.EXACT_QUADRATURE, quad_error=float(err))


Sampler = Union[EveSnrDistribution, Callable[[np.random.Generator, int], np.ndarray]]


def ail_mc(point: FblOperatingPoint, sampler: Sampler, n_samples: int,
           rng: np.random.Generator) -> LeakageEstimate:
    """Monte Carlo AIL: sample mean of the instantaneous leakage."""
    if n_samples < 1000:
        raise ValueError("ail_mc needs at least 1000 samples")
    if hasattr(sampler, "sample"):
        draws = sampler.sample(rng, int(n_samples))
    else:
        draws = sampler(rng, int(n_samples))
    leak = np.asarray(instant_leakage(point, np.asarray(draws, dtype=float)), dtype=float)
    mean = float(leak.mean())
    se = float(leak.std(ddof=1) / math.sqrt(leak.size))
    return LeakageEstimate(min(max(mean, 0.0), 1.0), Method.MONTE_CARLO, std_error=se)


def ail_saddlepoint(point: FblOperatingPoint, dist: EveSnrDistribution) -> LeakageEstimate:
    """Saddle-point AIL ``1 - F(x0)``; equals 1 when ``x0 < 0``.

    The tail is read from the distribution's survival function so that
    small leakages keep their relative accuracy.
    """
    x = x0(point)
    value = 1.0 if x < 0 else float(dist.sf(x))
    return LeakageEstimate(min(max(value, 0.0), 1.0), Method.SADDLE_POINT)


def _saddle_vec(gamma_b, n, m, q_inv_eps, dist):
    # Vectorized saddle-point AIL over arrays of gamma_b and/or n.
    x = np.asarray(_x0(gamma_b, n, m, q_inv_eps), dtype=float)
    val = np.asarray(dist.sf(np.maximum(x, 0.0)), dtype=float)
    return np.where(x < 0, 1.0, val)


# Per-branch closed forms, written out from their formulas.

def ail_rayleigh_an(x0_value, gamma_e_bar, alpha, k):
    tau = 1.0 + x0_value * (1.0 - alpha) / (alpha * (k - 1))
    return math.exp(-x0_value / (alpha * gamma_e_bar)) / tau ** (k - 1)


def ail_rayleigh_mrt(x0_value, gamma_e_bar):
    return math.exp(-x0_value / gamma_e_bar)


def ail_rician_an(x0_value, shape, scale):
    return 1.0 - specfun.reg_lower_gamma(shape, x0_value / scale)


def ail_rician_mrt(x0_value, gamma_e_bar, k_e, k):
    return specfun.marcum_q(1.0, math.sqrt(2.0 * k * k_e),
                            math.sqrt(2.0 * (1.0 + k_e) * x0_value / gamma_e_bar))


def _closed_form_at(x_value, dist):
    if isinstance(dist, RayleighANEve):
        return ail_rayleigh_an(x_value, dist.gamma_e_bar, dist.alpha, dist.k)
    if isinstance(dist, RayleighMRTEve):
        return ail_rayleigh_mrt(x_value, dist.gamma_e_bar)
    if isinstance(dist, RicianANGammaFit):
        return ail_rician_an(x_value, dist.shape, dist.scale)
    if isinstance(dist, RicianMRTBound):
        return ail_rician_mrt(x_value, dist.gamma_e_bar, dist.k_e, dist.k)
    raise TypeError(f"no closed form for {type(dist).__name__}")


def ail_closed_form(point: FblOperatingPoint, dist: EveSnrDistribution) -> LeakageEstimate:
    """Branch closed form of the saddle-point AIL (``x0 < 0`` gives 1)."""
    x = x0(point)
    value = 1.0 if x < 0 else float(_closed_form_at(x, dist))
    return LeakageEstimate(min(max(value, 0.0), 1.0), Method.CLOSED_FORM)


def sop(redundancy_rate: float, dist: EveSnrDistribution) -> float:
    """Secrecy outage probability ``1 - F(2**R_e - 1)``."""
    thr = math.expm1(redundancy_rate * _LN2) if redundancy_rate < 1024 else math.inf
    if thr < 0:
        return 1.0
    return float(dist.sf(thr))


# ------------------------------------------------------------- high SNR

def r0_highsnr(n, m, epsilon) -> float:
    """Large-SNR limit of the required rate (dispersion at ``log2(e)**2``)."""
    return LOG2E / math.sqrt(n) * specfun.gaussian_q_inv(epsilon) + m / n


def x0_highsnr(gamma_b, n, m, epsilon) -> float:
    return gamma_b / 2.0 ** r0_highsnr(n, m, epsilon)


def ail_highsnr(dist: EveSnrDistribution, gamma_b: float, n, m, epsilon,
                printed_exponent: bool = False) -> LeakageEstimate:
    """High-SNR asymptote of the AIL for the branch of ``dist``.

    ``x0`` is replaced by ``gamma_b / 2**R0_inf``. In the Rayleigh-AN branch
    ``tau(x0)`` is replaced by its large-argument term ``(1-a) x0 / (a (k-1))``.
    With ``printed_exponent=True`` the Rayleigh-MRT and Rician-AN branches
    divide by ``R0_inf`` instead of ``2**R0_inf``; this variant is only kept
    for comparison.
    """
    r_inf = r0_highsnr(n, m, epsilon)
    x_inf = gamma_b / 2.0 ** r_inf
    x_alt = gamma_b / r_inf if printed_exponent else x_inf
    if isinstance(dist, RayleighANEve):
        a, k = dist.alpha, dist.k
        lead = (1.0 - a) * x_inf / (a * (k - 1))
        value = math.exp(-x_inf / (a * dist.gamma_e_bar)) / lead ** (k - 1) if lead > 0 else 1.0
    elif isinstance(dist, RayleighMRTEve):
        value = ail_rayleigh_mrt(x_alt, dist.gamma_e_bar)
    elif isinstance(dist, RicianANGammaFit):
        value = ail_rician_an(x_alt, dist.shape, dist.scale)
    elif isinstance(dist, RicianMRTBound):
        value = ail_rician_mrt(x_inf, dist.gamma_e_bar, dist.k_e, dist.k)
    else:
        raise TypeError(f"no high-SNR form for {type(dist).__name__}")
    return LeakageEstimate(min(max(float(value), 0.0), 1.0), Method.HIGH_SNR)


# --------------------------------------------------- Laplace diagnostics

@dataclass(frozen=True)
class LaplaceDiagnostic:
    x0: float
    xi: float
    xi_dd_numeric: float
    xi_dd_exact: float
    xi_dd_printed: float
    psi: float
    psi_printed: float
    product: float
    product_printed: float
    tail: float
    psi_check: float


def laplace_internals_check(point: FblOperatingPoint, dist: EveSnrDistribution,
                            h: Optional[float] = None) -> LaplaceDiagnostic:
    """Evaluate the Laplace-method ingredients at ``x0``.

    ``xi(x) = bracket(x)**2 / (2 V_e(x))`` and ``psi`` is chosen so that
    ``psi * exp(-n xi)`` is the integrand after integration by parts. At the
    root of the bracket, ``xi = 0``, ``xi'' = 1 / (x0 (x0 + 2))`` and
    ``psi = sqrt(n / (2 pi x0 (x0 + 2))) (1 - F(x0))``, so the Laplace
    product collapses to ``1 - F(x0)``. The printed pair, with ``xi''`` and
    ``psi**2`` both twice as large, has the same product; both are reported.
    ``psi_check`` is ``psi`` recomputed from a finite-difference derivative
    of the composite Q-function.
    """
    x_root = x0(point)
    if not x_root > 0:
        raise specfun.DomainError(f"laplace check needs x0 > 0, got {x_root}")
    r = r0(point)
    gb, n = point.gamma_b, point.n

    def bracket(x):
        return math.log2((1.0 + gb) / (1.0 + x)) - r

    def xi(x):
        return bracket(x) ** 2 / (2.0 * dispersion(x))

    def psi(x):
        g = x * (x + 2.0)
        return (math.sqrt(n / (2.0 * math.pi * g)) * (1.0 + bracket(x) / (g * LOG2E))
                * float(dist.sf(x)))

    if h is None:
        h = 1e-4 * x_root
    xi_dd = (xi(x_root + h) - 2.0 * xi(x_root) + xi(x_root - h)) / (h * h)
    g0 = x_root * (x_root + 2.0)
    tail = float(dist.sf(x_root))
    psi0 = psi(x_root)
    xi_dd_exact = 1.0 / g0
    product = math.exp(-n * xi(x_root)) * psi0 * math.sqrt(2.0 * math.pi / (n * xi_dd_exact))
    psi_printed = math.sqrt(n / (math.pi * g0)) * tail
    xi_dd_printed = 2.0 / g0
    product_printed = psi_printed * math.sqrt(2.0 * math.pi / (n * xi_dd_printed))

    def comp_q(x):
        return float(specfun.gaussian_q(_leak_argument(x, gb, n, r)))

    hq = 1e-6 * x_root
    dq = (comp_q(x_root + hq) - comp_q(x_root - hq)) / (2.0 * hq)
    psi_check = dq * tail / math.exp(-n * xi(x_root))
    return LaplaceDiagnostic(x_root, xi(x_root), xi_dd, xi_dd_exact, xi_dd_printed, psi0,
                             psi_printed, product, product_printed, tail, psi_check)

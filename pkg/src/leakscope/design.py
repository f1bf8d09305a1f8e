"""Secrecy-throughput design over blocklength and power allocation.

A slot with main-channel gain ``gamma_b_tilde`` yields the instantaneous
secrecy throughput (IST) ``(1 - eps) m / N`` when the saddle-point AIL at
``(N, alpha)`` meets the threshold ``phi`` and zero otherwise. Two designs
are provided:

* adaptive: ``(N, alpha)`` chosen per slot from the realized gain, either
  exhaustively (smallest feasible integer ``N``) or through the relaxed
  real-valued inverse blocklength ``theta(alpha)``;
* non-adaptive: a single ``(N, alpha)`` maximizing the on-off lower bound
  ``m (1 - eps) / N * P(gamma_b_tilde >= gamma_1)``.

Eve's SNR law for every ``alpha`` is served by :class:`EveFamily`, which
caches quantiles and, in the Rician-AN branch, reuses one set of channel
draws for all Gamma fits.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize

from . import specfun
from .channel import (
    EveSnrDistribution,
    MainGainDistribution,
    RayleighANEve,
    RayleighMRTEve,
    RicianANGammaFit,
    RicianMRTBound,
    SystemParams,
    _eve_snr_from_components,
    eve_quantile,
    fit_gamma_moments,
    sample_eve_components,
)
from .leakage import _x0, r0_highsnr

log = logging.getLogger(__name__)

__all__ = [
    "InfeasibleError",
    "RootNotFoundError",
    "DesignConfig",
    "SlotSolution",
    "DesignSolution",
    "EveFamily",
    "ist",
    "ail_inverse_blocklength",
    "solve_adaptive_slot",
    "solve_adaptive_relaxed",
    "solve_adaptive",
    "ast_adaptive_empirical",
    "ast_adaptive_integral",
    "gamma1_threshold",
    "ast_nonadaptive",
    "ast_surface",
    "solve_nonadaptive",
]

_THETA_FLOOR = 1e-6
_THETA_ITERS = 64


class InfeasibleError(ValueError):
    """No blocklength up to ``n_max`` meets the leakage threshold."""


class RootNotFoundError(ValueError):
    """The lower integration limit could not be bracketed."""


@dataclass(frozen=True)
class DesignConfig:
    """Search settings shared by the design solvers.

    Attributes
    ----------
    n_max, phi, slots
        Blocklength ceiling, AIL threshold and number of slots ``L``.
    alpha_grid
        Resolution of the final ``alpha`` refinement.
    seed
        Seed for the Philox stream used by Monte-Carlo pieces (Rician-AN
        Gamma fits and slot draws).
    n_min
        Smallest admissible blocklength. The normal approximation is poor
        for very short codes, so the default is 50; set 1 to search the
        full range ``1 <= N``.
    alpha_points
        Size of the coarse ``alpha`` grid on ``(0, 1]`` for adaptive solves.
    mc_budget
        Samples behind each Rician-AN Gamma fit.
    """

    n_max: int = 1000
    phi: float = 1e-4
    alpha_grid: float = 1e-3
    slots: int = 1000
    seed: int = 0
    n_min: int = 50
    alpha_points: int = 200
    mc_budget: int = 100_000

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be a positive integer, got {self.n_max}")
        if not 0 < self.phi < 1:
            raise ValueError(f"phi must lie in (0, 1), got {self.phi}")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError(f"n_min must lie in [1, n_max], got {self.n_min}")
        if not 0 < self.alpha_grid <= 0.1:
            raise ValueError(f"alpha_grid must lie in (0, 0.1], got {self.alpha_grid}")
        if self.alpha_points < 2:
            raise ValueError("alpha_points must be at least 2")
        if int(self.slots) != self.slots or self.slots < 1:
            raise ValueError(f"slots must be a positive integer, got {self.slots}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @classmethod
    def from_params(cls, params: SystemParams, **overrides) -> "DesignConfig":
        base = dict(n_max=int(params.n_max), phi=float(params.phi), slots=int(params.slots))
        base.update(overrides)
        base["n_min"] = min(base.get("n_min", cls.n_min), base["n_max"])
        return cls(**base)

    def rng(self, stream: int = 0) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=[int(self.seed), int(stream)]))


@dataclass(frozen=True)
class SlotSolution:
    """Per-slot design. ``theta`` is the real blocklength (relaxed solver)."""

    gamma_b_tilde: float
    n_opt: int
    alpha_opt: float
    ist: float
    feasible: bool
    theta: float = math.nan


@dataclass(frozen=True)
class DesignSolution:
    """Adaptive result (``per_slot`` filled) or global non-adaptive optimum."""

    ast: float
    n_opt: Optional[int] = None
    alpha_opt: Optional[float] = None
    per_slot: Tuple[SlotSolution, ...] = field(default_factory=tuple)


# ------------------------------------------------------------ Eve family

class EveFamily:
    """Eve's SNR law indexed by the power split ``alpha``.

    Parameters
    ----------
    params
        Scenario. With MRT only ``alpha = 1`` is meaningful and
        :meth:`alphas` returns that single value.
    mc_budget, rng
        Used only by the Rician-AN branch: one batch of joint channel draws
        is taken up front and every ``alpha`` refits the Gamma law to the
        same draws.
    """

    def __init__(self, params: SystemParams, mc_budget: int = 100_000,
                 rng: Optional[np.random.Generator] = None):
        self.params = params
        self.k = int(params.k)
        self.gamma_e_bar = float(params.gamma_e_bar)
        self.mrt = params.scheme.is_mrt
        self.rician = params.fading_e.is_rician
        self._fits: Dict[float, Tuple[float, float]] = {}
        self._quantiles: Dict[Tuple[float, float], float] = {}
        self._components = None
        if self.rician and not self.mrt:
            if mc_budget < 10_000:
                raise ValueError(f"Gamma fits need mc_budget >= 1e4, got {mc_budget}")
            if rng is None:
                rng = np.random.Generator(np.random.Philox(key=[0, 0]))
            self._components = sample_eve_components(params.eve_link, int(mc_budget), rng)

    @classmethod
    def from_config(cls, params: SystemParams, config: DesignConfig) -> "EveFamily":
        return cls(params, config.mc_budget, config.rng(stream=1))

    def alphas(self, points: int) -> np.ndarray:
        if self.mrt:
            return np.ones(1)
        return np.round(np.linspace(1.0 / points, 1.0, points), 12)

    def _fit(self, alpha: float) -> Tuple[float, float]:
        key = round(float(alpha), 12)
        if key not in self._fits:
            sig, noise = self._components
            snr = _eve_snr_from_components(sig, noise, key, self.gamma_e_bar, self.k)
            self._fits[key] = fit_gamma_moments(snr)
        return self._fits[key]

    def dist(self, alpha: float) -> EveSnrDistribution:
        alpha = float(alpha)
        link = replace(self.params.eve_link, alpha=alpha)
        if not self.rician:
            if self.mrt:
                return RayleighMRTEve(self.gamma_e_bar, link)
            return RayleighANEve(self.gamma_e_bar, alpha, self.k, link)
        if self.mrt:
            return RicianMRTBound(self.gamma_e_bar, self.params.fading_e.k_factor, self.k, link)
        shape, scale = self._fit(alpha)
        return RicianANGammaFit(shape, scale, int(self._components[0].size),
                                shape * scale, shape * scale * scale, link)

    def sf(self, x, alpha):
        """Survival function of Eve's SNR, broadcasting ``x`` against ``alpha``."""
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        alpha = np.asarray(alpha, dtype=float)
        if self.mrt:
            return np.asarray(self.dist(1.0).sf(x), dtype=float)
        if not self.rician:
            ag = alpha * self.gamma_e_bar
            tau = 1.0 + x * (1.0 - alpha) / (alpha * (self.k - 1))
            return np.exp(-x / ag) * tau ** (-(self.k - 1))
        x, alpha = np.broadcast_arrays(x, alpha)
        uniq, inv = np.unique(alpha, return_inverse=True)
        fits = np.array([self._fit(a) for a in uniq])
        shape = fits[inv.reshape(alpha.shape), 0]
        scale = fits[inv.reshape(alpha.shape), 1]
        return np.asarray(specfun.reg_upper_gamma(shape, x / scale), dtype=float)

    def quantile(self, p: float, alpha: float) -> float:
        key = (float(p), round(float(alpha), 12))
        if key not in self._quantiles:
            self._quantiles[key] = eve_quantile(self.dist(key[1]), key[0])
        return self._quantiles[key]

    def ail(self, gamma_b_tilde, n, alpha):
        """Saddle-point AIL at Bob SNR ``alpha * gamma_b_tilde`` (broadcasts)."""
        p = self.params
        q_inv = specfun.gaussian_q_inv(p.epsilon)
        alpha = np.asarray(alpha, dtype=float)
        # Very short blocklengths overflow 2**R0; the limit x0 = -1 is exact.
        with np.errstate(over="ignore"):
            x = np.asarray(_x0(alpha * np.asarray(gamma_b_tilde, dtype=float),
                               np.asarray(n, dtype=float), p.m, q_inv), dtype=float)
        return np.where(x < 0, 1.0, self.sf(np.maximum(x, 0.0), alpha))


def _family(params: SystemParams, config: DesignConfig, family: Optional[EveFamily]) -> EveFamily:
    return family if family is not None else EveFamily.from_config(params, config)


# --------------------------------------------------------------- IST

def ist(n, m, epsilon, ail_value, phi) -> float:
    """Instantaneous secrecy throughput ``(1-eps) m / n`` gated by ``ail <= phi``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return (1.0 - epsilon) * m / n if ail_value <= phi else 0.0


# ------------------------------------------------------ inverse blocklength

def _theta(family: EveFamily, gamma_b_tilde, alpha, phi: float, n_hi: float) -> np.ndarray:
    """Real blocklength where the AIL falls to ``phi``; ``inf`` if above ``n_hi``.

    Bisection on ``log N`` over ``[1e-6, n_hi]``, vectorized over the
    broadcast of ``gamma_b_tilde`` and ``alpha``. The AIL is nonincreasing
    in ``N`` and equals 1 for vanishing ``N``.
    """
    g, a = np.broadcast_arrays(np.asarray(gamma_b_tilde, dtype=float),
                               np.asarray(alpha, dtype=float))
    feasible = family.ail(g, n_hi, a) <= phi
    lo = np.full(g.shape, math.log(_THETA_FLOOR))
    hi = np.full(g.shape, math.log(n_hi))
    for _ in range(_THETA_ITERS):
        mid = 0.5 * (lo + hi)
        ok = family.ail(g, np.exp(mid), a) <= phi
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return np.where(feasible, np.exp(hi), np.inf)


def ail_inverse_blocklength(phi: float, alpha: float, gamma_b_tilde: float,
                            params: SystemParams, config: Optional[DesignConfig] = None,
                            family: Optional[EveFamily] = None) -> float:
    """Smallest real ``N`` with saddle-point AIL equal to ``phi``.

    Raises
    ------
    InfeasibleError
        When the AIL at ``N = n_max`` still exceeds ``phi``.
    """
    config = config or DesignConfig.from_params(params)
    family = _family(params, config, family)
    value = float(_theta(family, gamma_b_tilde, alpha, phi, float(config.n_max)))
    if not math.isfinite(value):
        raise InfeasibleError(
            f"AIL above phi={phi:g} at n_max={config.n_max} "
            f"(alpha={alpha:g}, gamma_b_tilde={gamma_b_tilde:g})")
    return value


# ------------------------------------------------------ adaptive design

def _infeasible(g: float, family: EveFamily, alphas: np.ndarray, config: DesignConfig) -> SlotSolution:
    a = float(alphas[int(np.argmin(family.ail(g, config.n_max, alphas)))])
    return SlotSolution(float(g), int(config.n_max), a, 0.0, False)


def _exhaustive_batch(gains: np.ndarray, family: EveFamily, params: SystemParams,
                      config: DesignConfig) -> List[SlotSolution]:
    phi = config.phi
    alphas = family.alphas(config.alpha_points)
    g = gains[:, None]
    a = alphas[None, :]
    n_lo, n_hi = int(config.n_min), int(config.n_max)
    feasible = family.ail(g, n_hi, a) <= phi
    first_ok = family.ail(g, n_lo, a) <= phi
    # Integer bisection: ``hi`` stays feasible, ``lo`` infeasible.
    lo = np.full(feasible.shape, n_lo)
    hi = np.full(feasible.shape, n_hi)
    active = feasible & ~first_ok
    while True:
        gap = active & (hi - lo > 1)
        if not gap.any():
            break
        mid = (lo + hi) // 2
        ok = family.ail(g, mid, a) <= phi
        hi = np.where(gap & ok, mid, hi)
        lo = np.where(gap & ~ok, mid, lo)
    n_int = np.where(first_ok, n_lo, np.where(feasible, hi, np.iinfo(np.int64).max))

    out = []
    for i, gi in enumerate(gains):
        best = int(n_int[i].min())
        if best > n_hi:
            out.append(_infeasible(gi, family, alphas, config))
            continue
        cand = np.flatnonzero(n_int[i] == best)
        j = int(cand[np.argmin(family.ail(gi, best, alphas[cand]))])
        alpha = float(alphas[j])
        # Local continuous search: the grid may miss a narrow alpha window
        # that already satisfies the constraint one step shorter.
        while best > n_lo and not family.mrt:
            trial = best - 1
            jj = int(np.argmin(family.ail(gi, trial, alphas)))
            lo_a = float(alphas[max(jj - 1, 0)]) if jj > 0 else float(alphas[0]) * 0.5
            hi_a = float(alphas[min(jj + 1, alphas.size - 1)])
            res = optimize.minimize_scalar(
                lambda t: math.log(max(float(family.ail(gi, trial, t)), 1e-300)),
                bounds=(lo_a, hi_a), method="bounded",
                options={"xatol": config.alpha_grid * 1e-2})
            a_star = float(res.x)
            if float(family.ail(gi, trial, a_star)) <= phi:
                best, alpha = trial, a_star
            else:
                break
        out.append(SlotSolution(float(gi), best, alpha,
                                ist(best, params.m, params.epsilon, 0.0, phi), True))
    return out


def _theta_slope(family: EveFamily, g, alpha, phi, n_hi, h=1e-3):
    """Central finite difference of theta in alpha (one-sided at alpha = 1)."""
    alpha = np.asarray(alpha, dtype=float)
    step = h * alpha
    up = np.minimum(alpha + step, 1.0)
    down = alpha - step
    t_up = _theta(family, g, up, phi, n_hi)
    t_dn = _theta(family, g, down, phi, n_hi)
    with np.errstate(invalid="ignore"):
        return (t_up - t_dn) / (up - down)


def _relaxed_batch(gains: np.ndarray, family: EveFamily, params: SystemParams,
                   config: DesignConfig) -> List[SlotSolution]:
    phi, n_hi, n_lo = config.phi, float(config.n_max), int(config.n_min)
    alphas = family.alphas(config.alpha_points)
    theta = _theta(family, gains[:, None], alphas[None, :], phi, n_hi)
    if alphas.size == 1:
        a_star = np.ones(gains.size)
    else:
        slope = _theta_slope(family, gains[:, None], alphas[None, :], phi, n_hi)
        finite = np.isfinite(slope[:, :-1]) & np.isfinite(slope[:, 1:])
        change = finite & (slope[:, :-1] < 0) & (slope[:, 1:] > 0)
        grid_best = np.argmin(theta, axis=1)
        a_star = alphas[grid_best].astype(float)
        has = change.any(axis=1)
        j = np.zeros(gains.size, dtype=int)
        for i in np.flatnonzero(has):
            idx = np.flatnonzero(change[i])
            if idx.size > 1:
                log.info("theta(alpha) has %d stationary brackets at gain %.6g; "
                         "keeping the lowest", idx.size, gains[i])
            j[i] = idx[np.argmin(np.minimum(theta[i, idx], theta[i, idx + 1]))]
        rows = np.flatnonzero(has)
        if rows.size:
            lo = alphas[j[rows]].astype(float)
            hi = alphas[j[rows] + 1].astype(float)
            gsub = gains[rows]
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                s = _theta_slope(family, gsub, mid, phi, n_hi)
                neg = s < 0
                lo = np.where(neg, mid, lo)
                hi = np.where(neg, hi, mid)
            refined = 0.5 * (lo + hi)
            t_ref = _theta(family, gsub, refined, phi, n_hi)
            better = t_ref <= theta[rows, grid_best[rows]]
            a_star[rows] = np.where(better, refined, a_star[rows])
    t_star = _theta(family, gains, a_star, phi, n_hi)
    out = []
    for g, a, t in zip(gains, a_star, t_star):
        if not math.isfinite(t):
            sol = _infeasible(g, family, alphas, config)
            out.append(sol)
            continue
        n = min(max(n_lo, int(math.ceil(t - 1e-9 * t))), config.n_max)
        out.append(SlotSolution(float(g), n, float(a),
                                ist(n, params.m, params.epsilon, 0.0, phi), True, float(t)))
    return out


def solve_adaptive(gains: Sequence[float], params: SystemParams,
                   config: Optional[DesignConfig] = None, method: str = "exhaustive",
                   family: Optional[EveFamily] = None) -> DesignSolution:
    """Per-slot adaptive design over many slot gains.

    ``method`` is ``"exhaustive"`` (smallest feasible integer ``N`` with an
    ``alpha`` search at each candidate) or ``"relaxed"`` (minimize the real
    inverse blocklength ``theta(alpha)`` and round up).
    """
    config = config or DesignConfig.from_params(params)
    family = _family(params, config, family)
    gains = np.atleast_1d(np.asarray(gains, dtype=float))
    if np.any(gains < 0) or not np.all(np.isfinite(gains)):
        raise ValueError("slot gains must be finite and nonnegative")
    if method == "exhaustive":
        slots = _exhaustive_batch(gains, family, params, config)
    elif method == "relaxed":
        slots = _relaxed_batch(gains, family, params, config)
    else:
        raise ValueError(f"unknown adaptive method {method!r}")
    ast = float(np.mean([s.ist for s in slots])) if slots else 0.0
    return DesignSolution(ast=ast, per_slot=tuple(slots))


def solve_adaptive_slot(gamma_b_tilde: float, params: SystemParams,
                        config: Optional[DesignConfig] = None,
                        family: Optional[EveFamily] = None) -> SlotSolution:
    """Smallest feasible blocklength for one slot, with its power split."""
    return solve_adaptive([gamma_b_tilde], params, config, "exhaustive", family).per_slot[0]


def solve_adaptive_relaxed(gamma_b_tilde: float, params: SystemParams,
                           config: Optional[DesignConfig] = None,
                           family: Optional[EveFamily] = None) -> SlotSolution:
    """Relaxed per-slot design ``N = ceil(theta(alpha*))``.

    Raises
    ------
    InfeasibleError
        When no ``alpha`` reaches ``phi`` within ``n_max``.
    """
    sol = solve_adaptive([gamma_b_tilde], params, config, "relaxed", family).per_slot[0]
    if not sol.feasible:
        raise InfeasibleError(f"slot with gain {gamma_b_tilde:g} is infeasible")
    return sol


def ast_adaptive_empirical(slots: Sequence[float], params: SystemParams,
                           config: Optional[DesignConfig] = None, method: str = "relaxed",
                           family: Optional[EveFamily] = None) -> float:
    """Average IST over the given slot gains."""
    return solve_adaptive(slots, params, config, method, family).ast


def _gamma0_gap(x: float, sol: SlotSolution, params: SystemParams, n_cap: int) -> float:
    # Both sides of the lower-limit equation, in nats; infeasible slots use
    # alpha = 1 (largest Bob SNR) and the blocklength ceiling.
    a, n = (sol.alpha_opt, sol.n_opt) if sol.feasible else (1.0, n_cap)
    y = a * x
    lhs = math.log1p(y)
    disp = 1.0 - 1.0 / (y + 1.0) ** 2
    rhs = math.sqrt(disp / n) * specfun.gaussian_q_inv(params.epsilon) + params.m * math.log(2.0) / n
    return lhs - rhs


def ast_adaptive_integral(params: SystemParams, config: Optional[DesignConfig] = None,
                          family: Optional[EveFamily] = None, panels: int = 128,
                          order: int = 8) -> float:
    """Large-``L`` limit of the adaptive AST as an integral over the gain law.

    The lower limit ``gamma_0`` solves the rate balance at the relaxed
    design, found by bisection after geometric bracketing. The integrand
    ``f(x) / upsilon(x)`` is piecewise smooth, so a composite Gauss-Legendre
    rule is used on ``[gamma_0, x_hi]`` with ``x_hi`` the ``1 - 1e-12``
    quantile of the gain.

    Raises
    ------
    RootNotFoundError
        If no sign change is found below ``1e3`` times the mean gain.
    """
    config = config or DesignConfig.from_params(params)
    family = _family(params, config, family)
    main = MainGainDistribution(params.fading_b, params.gamma_b_bar, int(params.k))
    mean = main.mean()

    def gap(x):
        sol = _relaxed_batch(np.array([x]), family, params, config)[0]
        return _gamma0_gap(x, sol, params, config.n_max)

    hi = mean
    while gap(hi) <= 0:
        hi *= 2.0
        if hi > 1e3 * mean:
            raise RootNotFoundError("no nonnegative lower limit below 1e3 * mean gain")
    gamma0 = optimize.bisect(gap, 0.0, hi, xtol=1e-10 * hi) if gap(0.0) < 0 else 0.0

    x_hi = main.quantile(1.0 - 1e-12)
    if x_hi <= gamma0:
        return 0.0
    t, w = leggauss(order)
    edges = np.linspace(gamma0, x_hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    sols = _relaxed_batch(nodes, family, params, config)
    inv_n = np.array([1.0 / s.n_opt if s.feasible else 0.0 for s in sols])
    dens = np.asarray(main.pdf(nodes), dtype=float)
    return float(params.m * (1.0 - params.epsilon) * np.sum(weights * dens * inv_n))


# --------------------------------------------------- non-adaptive design

def gamma1_threshold(n, alpha: float, params: SystemParams, dist: Optional[EveSnrDistribution] = None,
                     phi: Optional[float] = None, family: Optional[EveFamily] = None):
    """On-off gain threshold ``(2**R_inf (1 + Omega(1 - phi)) - 1) / alpha``.

    ``n`` may be an array. ``Omega`` is Eve's quantile under ``alpha``,
    taken from ``dist`` when given, else from ``family``.
    """
    phi = params.phi if phi is None else phi
    if dist is not None:
        omega = eve_quantile(dist, 1.0 - phi)
    else:
        family = family or EveFamily(params)
        omega = family.quantile(1.0 - phi, alpha)
    n = np.asarray(n, dtype=float)
    q_inv = specfun.gaussian_q_inv(params.epsilon)
    r_inf = math.log2(math.e) / np.sqrt(n) * q_inv + params.m / n
    out = (np.exp2(r_inf) * (1.0 + omega) - 1.0) / alpha
    return float(out) if out.ndim == 0 else out


def ast_nonadaptive(n, alpha: float, params: SystemParams, dist: Optional[EveSnrDistribution] = None,
                    phi: Optional[float] = None, family: Optional[EveFamily] = None):
    """On-off lower bound ``m (1 - eps) / N * P(gamma_b_tilde >= gamma_1)``."""
    g1 = gamma1_threshold(n, alpha, params, dist, phi, family)
    main = MainGainDistribution(params.fading_b, params.gamma_b_bar, int(params.k))
    n = np.asarray(n, dtype=float)
    out = params.m * (1.0 - params.epsilon) / n * np.asarray(main.sf(g1), dtype=float)
    return float(out) if out.ndim == 0 else out


def ast_surface(ns, alphas, params: SystemParams, config: Optional[DesignConfig] = None,
                family: Optional[EveFamily] = None) -> np.ndarray:
    """Non-adaptive objective on the grid ``alphas x ns`` (rows follow ``alphas``)."""
    config = config or DesignConfig.from_params(params)
    family = _family(params, config, family)
    ns = np.asarray(ns, dtype=float)
    return np.array([ast_nonadaptive(ns, float(a), params, phi=config.phi, family=family)
                     for a in alphas])


def _best_cell(values: np.ndarray, ns: np.ndarray, alphas: np.ndarray):
    # Max with deterministic tie-break: smallest N, then smallest alpha.
    flat = [(-values[i, j], ns[j], alphas[i], i, j)
            for i in range(alphas.size) for j in range(ns.size)]
    flat.sort()
    return flat


def solve_nonadaptive(params: SystemParams, config: Optional[DesignConfig] = None,
                      family: Optional[EveFamily] = None) -> DesignSolution:
    """Global ``(N, alpha)`` maximizing the non-adaptive AST bound.

    A coarse grid (step 10 in ``N``, 0.02 in ``alpha``) locates the top
    three cells; each is refined exhaustively at step 1 in ``N`` and
    ``config.alpha_grid`` in ``alpha`` over the neighbouring coarse cells.
    """
    config = config or DesignConfig.from_params(params)
    family = _family(params, config, family)
    n_lo, n_hi = int(config.n_min), int(config.n_max)
    ns = np.unique(np.append(np.arange(n_lo, n_hi + 1, 10), n_hi))
    if family.mrt:
        alphas = np.ones(1)
    else:
        alphas = np.round(np.arange(1, 51) * 0.02, 12)
    coarse = ast_surface(ns, alphas, params, config, family)
    ranked = _best_cell(coarse, ns, alphas)[:3]

    best = ranked[0][:3]
    for _, n_c, a_c, _, _ in ranked:
        n_ref = np.arange(max(n_lo, int(n_c) - 10), min(n_hi, int(n_c) + 10) + 1)
        if family.mrt:
            a_ref = np.ones(1)
        else:
            steps = int(round(0.02 / config.alpha_grid))
            a_ref = np.round(a_c + np.arange(-steps, steps + 1) * config.alpha_grid, 12)
            a_ref = a_ref[(a_ref > 0) & (a_ref <= 1.0)]
        surf = ast_surface(n_ref, a_ref, params, config, family)
        cand = _best_cell(surf, n_ref, a_ref)[0][:3]
        if cand < best:
            best = cand
    value, n_opt, a_opt = -best[0], int(best[1]), float(best[2])
    return DesignSolution(ast=float(value), n_opt=n_opt, alpha_opt=a_opt)

"""Fading, beamforming and the SNR distributions seen by Bob and Eve.

Alice has ``k`` antennas; Bob and Eve have one each. Small-scale fading
vectors are rows of length ``k`` normalized so every entry has unit mean
power. Artificial-noise (AN) beamforming puts a fraction ``alpha`` of the
power on the matched direction of Bob's channel and spreads the rest over
its nullspace; ``alpha = 1`` is maximum ratio transmission (MRT).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import specfun

__all__ = [
    "ChannelError",
    "InsufficientSamplesError",
    "FitError",
    "NoPdfError",
    "LinkGeometry",
    "FadingModel",
    "BeamformingScheme",
    "SystemParams",
    "EveLink",
    "EveSnrDistribution",
    "RayleighANEve",
    "RayleighMRTEve",
    "RicianANGammaFit",
    "RicianMRTBound",
    "MainGainDistribution",
    "mean_snr",
    "sample_fading",
    "an_beamformer",
    "snr_bob",
    "snr_eve_sample",
    "sample_eve_components",
    "gamma_b_tilde_cdf",
    "gamma_b_tilde_pdf",
    "fit_gamma_moments",
    "build_eve_distribution",
    "eve_quantile",
]


class ChannelError(ValueError):
    """Invalid channel or scenario parameters."""


class InsufficientSamplesError(ChannelError):
    pass


class FitError(ChannelError):
    pass


class NoPdfError(ChannelError):
    """The distribution branch only provides a CDF."""


# ------------------------------------------------------------------ types

@dataclass(frozen=True)
class LinkGeometry:
    """Large-scale attenuation ``beta0 * distance**(-eta)``."""

    beta0: float = 1.0
    distance: float = 1.0
    eta: float = 0.0

    def __post_init__(self):
        if not self.beta0 > 0:
            raise ChannelError(f"beta0 must be positive, got {self.beta0}")
        if not self.distance > 0:
            raise ChannelError(f"distance must be positive, got {self.distance}")
        if not self.eta >= 0:
            raise ChannelError(f"eta must be nonnegative, got {self.eta}")

    @property
    def gain(self) -> float:
        return self.beta0 * self.distance ** (-self.eta)


@dataclass(frozen=True)
class FadingModel:
    """Rayleigh or Rician small-scale fading.

    ``los_phases`` is the unit-modulus line-of-sight vector; ``None`` means
    all ones. A Rician model with ``k_factor = 0`` has the same law as
    Rayleigh, but the two kinds select different analytical branches for
    Eve's SNR.
    """

    kind: str = "rayleigh"
    k_factor: float = 0.0
    los_phases: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("rayleigh", "rician"):
            raise ChannelError(f"unknown fading kind {self.kind!r}")
        if not self.k_factor >= 0:
            raise ChannelError(f"K-factor must be nonnegative, got {self.k_factor}")
        if self.kind == "rayleigh" and self.k_factor != 0:
            raise ChannelError("Rayleigh fading has K = 0")
        if self.los_phases is not None:
            mags = np.abs(np.asarray(self.los_phases, dtype=complex))
            if not np.allclose(mags, 1.0, atol=1e-12):
                raise ChannelError("LoS phase entries must have unit modulus")

    @classmethod
    def rayleigh(cls) -> "FadingModel":
        return cls("rayleigh", 0.0)

    @classmethod
    def rician(cls, k_factor: float, los_phases=None) -> "FadingModel":
        if los_phases is not None:
            los_phases = tuple(complex(z) for z in los_phases)
        return cls("rician", float(k_factor), los_phases)

    @property
    def is_rician(self) -> bool:
        return self.kind == "rician"

    def los(self, k: int) -> np.ndarray:
        if self.los_phases is None:
            return np.ones(k, dtype=complex)
        z = np.asarray(self.los_phases, dtype=complex)
        if z.shape != (k,):
            raise ChannelError(f"LoS vector has length {z.size}, expected {k}")
        return z


@dataclass(frozen=True)
class BeamformingScheme:
    """Power split ``alpha`` between message and artificial noise."""

    alpha: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ChannelError(f"alpha must lie in (0, 1], got {self.alpha}")

    @classmethod
    def an(cls, alpha: float) -> "BeamformingScheme":
        return cls(float(alpha))

    @classmethod
    def mrt(cls) -> "BeamformingScheme":
        return cls(1.0)

    @property
    def is_mrt(self) -> bool:
        return self.alpha >= 1.0

    @property
    def name(self) -> str:
        return "mrt" if self.is_mrt else "an"


@dataclass(frozen=True)
class SystemParams:
    """Complete scenario description, linear units throughout.

    Defaults follow the reference setting: m = 100 bits, rho = 0 dB,
    eps = 1e-3, phi = 1e-4, k = 4, N = 400, N_max = 1000, L = 1000,
    beta_b = 3 and beta_e = 1. ``main_gain`` is the realized ``||h_b||**2``
    used by fixed-realization experiments, so that there
    ``gamma_b_tilde = rho * 3``.
    """

    k: int = 4
    rho: float = 1.0
    geometry_b: LinkGeometry = field(default_factory=lambda: LinkGeometry(beta0=3.0))
    geometry_e: LinkGeometry = field(default_factory=LinkGeometry)
    fading_b: FadingModel = field(default_factory=FadingModel.rayleigh)
    fading_e: FadingModel = field(default_factory=FadingModel.rayleigh)
    scheme: BeamformingScheme = field(default_factory=lambda: BeamformingScheme(0.7))
    m: float = 100.0
    n: int = 400
    epsilon: float = 1e-3
    phi: float = 1e-4
    n_max: int = 1000
    slots: int = 1000
    main_gain: float = 1.0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ChannelError(f"k must be a positive integer, got {self.k}")
        if not self.scheme.is_mrt and self.k < 2:
            raise ChannelError("AN beamforming needs k >= 2")
        if not self.rho >= 0:
            raise ChannelError(f"rho must be nonnegative, got {self.rho}")
        if not self.m >= 1:
            raise ChannelError(f"m must be >= 1, got {self.m}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ChannelError(f"n_max must be a positive integer, got {self.n_max}")
        if not 1 <= self.n <= self.n_max:
            raise ChannelError(f"n must satisfy 1 <= n <= n_max, got {self.n}")
        if not 0 < self.epsilon < 1:
            raise ChannelError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < self.phi < 1:
            raise ChannelError(f"phi must lie in (0, 1), got {self.phi}")
        if int(self.slots) != self.slots or self.slots < 1:
            raise ChannelError(f"slots must be a positive integer, got {self.slots}")
        if not self.main_gain >= 0:
            raise ChannelError(f"main_gain must be nonnegative, got {self.main_gain}")

    @property
    def alpha(self) -> float:
        return self.scheme.alpha

    @property
    def gamma_b_bar(self) -> float:
        return mean_snr(self.rho, self.geometry_b)

    @property
    def gamma_e_bar(self) -> float:
        return mean_snr(self.rho, self.geometry_e)

    @property
    def gamma_b_tilde(self) -> float:
        """Bob's beamforming-free SNR for the fixed realization ``main_gain``."""
        return self.gamma_b_bar * self.main_gain

    @property
    def gamma_b(self) -> float:
        return self.alpha * self.gamma_b_tilde

    @property
    def eve_link(self) -> "EveLink":
        return EveLink(int(self.k), self.alpha, self.gamma_e_bar, self.fading_b, self.fading_e)

    def with_alpha(self, alpha: float) -> "SystemParams":
        from dataclasses import replace

        return replace(self, scheme=BeamformingScheme(float(alpha)))


@dataclass(frozen=True)
class EveLink:
    """What is needed to simulate Eve's SNR from channel draws."""

    k: int
    alpha: float
    gamma_e_bar: float
    fading_b: FadingModel
    fading_e: FadingModel


# ------------------------------------------------------------- primitives

def mean_snr(rho: float, geo: LinkGeometry) -> float:
    """Average received SNR ``rho * beta0 * d**(-eta)``."""
    if rho < 0:
        raise ChannelError("rho must be nonnegative")
    return rho * geo.gain


def sample_fading(fading: FadingModel, k: int, rng: np.random.Generator, size=None) -> np.ndarray:
    """Draw small-scale fading rows with unit mean power per entry.

    Returns shape ``(k,)`` or ``(size, k)``.
    """
    shape = (k,) if size is None else (int(size), k)
    cn = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    if not fading.is_rician or fading.k_factor == 0:
        return cn
    kf = fading.k_factor
    return math.sqrt(kf / (1.0 + kf)) * fading.los(k) + math.sqrt(1.0 / (1.0 + kf)) * cn


def an_beamformer(h_b: np.ndarray):
    """Matched direction and an orthonormal nullspace basis for ``h_b``.

    ``w = h_b^H / ||h_b||`` is the principal eigenvector of the rank-one
    matrix ``h_b^H h_b``. ``U`` holds the remaining ``k - 1`` columns of a
    Householder reflector whose first column is parallel to ``w``.

    Returns
    -------
    w : ndarray, shape (k,)
    U : ndarray, shape (k, k - 1)
    """
    h_b = np.asarray(h_b, dtype=complex).ravel()
    norm = float(np.linalg.norm(h_b))
    if norm < 1e-300:
        raise ChannelError("an_beamformer: main channel vector is (numerically) zero")
    k = h_b.size
    w = np.conj(h_b) / norm
    w0 = w[0]
    c = np.conj(w0) / abs(w0) if abs(w0) > 0 else 1.0
    v = -c * w
    v[0] += 1.0
    # v = e1 + c*w would flip the sign; e1 - c*w with |w0| near 1 cancels,
    # so pick whichever is longer.
    v_alt = c * w
    v_alt[0] += 1.0
    if np.vdot(v_alt, v_alt).real > np.vdot(v, v).real:
        v = v_alt
    vv = np.vdot(v, v).real
    house = np.eye(k, dtype=complex)
    if vv > 0:
        house -= 2.0 * np.outer(v, np.conj(v)) / vv
    return w, house[:, 1:]


def snr_bob(alpha: float, gamma_b_bar: float, h_b: np.ndarray) -> float:
    """Bob's SNR ``alpha * gamma_b_bar * ||h_b||**2``."""
    h_b = np.asarray(h_b)
    return float(alpha * gamma_b_bar * np.sum(np.abs(h_b) ** 2))


def snr_eve_sample(scheme, h_e, w, U, alpha, gamma_e_bar, k) -> float:
    """Eve's SNR for one realization given the beamformer ``(w, U)``.

    ``scheme`` may be a :class:`BeamformingScheme` or the strings
    ``"an"``/``"mrt"``.
    """
    name = scheme.name if isinstance(scheme, BeamformingScheme) else str(scheme).lower()
    h_e = np.asarray(h_e, dtype=complex).ravel()
    sig = abs(np.dot(h_e, w)) ** 2
    if name == "mrt" or alpha >= 1.0:
        return float(gamma_e_bar * sig)
    noise = float(np.sum(np.abs(h_e @ U) ** 2))
    return float(alpha * gamma_e_bar * sig / ((1.0 - alpha) / (k - 1) * gamma_e_bar * noise + 1.0))


def sample_eve_components(link: EveLink, n: int, rng: np.random.Generator):
    """Joint draws of ``|h_e w|**2`` and ``||h_e U||**2``.

    Bob's channel is redrawn per sample, so the result is Eve's SNR law
    averaged over the main channel. The nullspace energy uses
    ``||h_e U||**2 = ||h_e||**2 - |h_e w|**2``, valid because ``[w U]`` is
    unitary.
    """
    h_b = sample_fading(link.fading_b, link.k, rng, n)
    h_e = sample_fading(link.fading_e, link.k, rng, n)
    norm_b = np.linalg.norm(h_b, axis=1)
    # h_e w with w = conj(h_b)/||h_b||.
    proj = np.einsum("ij,ij->i", h_e, np.conj(h_b)) / norm_b
    sig = np.abs(proj) ** 2
    total = np.sum(np.abs(h_e) ** 2, axis=1)
    noise = np.maximum(total - sig, 0.0)
    return sig, noise


def _eve_snr_from_components(sig, noise, alpha, gamma_e_bar, k):
    if alpha >= 1.0:
        return gamma_e_bar * sig
    return alpha * gamma_e_bar * sig / ((1.0 - alpha) / (k - 1) * gamma_e_bar * noise + 1.0)


def sample_eve_snr(link: EveLink, n: int, rng: np.random.Generator) -> np.ndarray:
    sig, noise = sample_eve_components(link, n, rng)
    return _eve_snr_from_components(sig, noise, link.alpha, link.gamma_e_bar, link.k)


# ----------------------------------------------------- Eve's distributions

def _bisect_increasing(func, target, lo, hi, iters=400):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if func(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class EveSnrDistribution:
    """Law of Eve's SNR. Subclasses implement ``sf`` (and ``pdf`` if any)."""

    branch = "abstract"
    has_pdf = True
    link: Optional[EveLink] = None

    def sf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0, 0.0, 1.0 - np.asarray(self.sf(np.maximum(x, 0.0))))
        return float(out) if out.ndim == 0 else out

    def pdf(self, x):
        raise NoPdfError(f"{self.branch} has no density")

    def quantile(self, p: float) -> float:
        return eve_quantile(self, p)

    def mean(self) -> float:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Eve SNR draws from the underlying channel model."""
        if self.link is None:
            raise ChannelError(f"{self.branch} carries no channel model to sample from")
        return sample_eve_snr(self.link, n, rng)


@dataclass(frozen=True)
class RayleighANEve(EveSnrDistribution):
    gamma_e_bar: float
    alpha: float
    k: int
    link: Optional[EveLink] = None
    branch = "rayleigh-an"

    def tau(self, x):
        return 1.0 + np.asarray(x, dtype=float) * (1.0 - self.alpha) / (self.alpha * (self.k - 1))

    def sf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        ag = self.alpha * self.gamma_e_bar
        out = np.exp(-x / ag) * self.tau(x) ** (-(self.k - 1))
        return float(out) if out.ndim == 0 else out

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        ag = self.alpha * self.gamma_e_bar
        t = self.tau(np.maximum(x, 0.0))
        out = (t + self.gamma_e_bar * (1.0 - self.alpha)) / ag * np.exp(-np.maximum(x, 0) / ag) * t ** (-self.k)
        out = np.where(x < 0, 0.0, out)
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        from scipy.integrate import quad

        return quad(self.sf, 0, np.inf)[0]


@dataclass(frozen=True)
class RayleighMRTEve(EveSnrDistribution):
    gamma_e_bar: float
    link: Optional[EveLink] = None
    branch = "rayleigh-mrt"

    def sf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        out = np.exp(-x / self.gamma_e_bar)
        return float(out) if out.ndim == 0 else out

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0, 0.0, np.exp(-np.maximum(x, 0) / self.gamma_e_bar) / self.gamma_e_bar)
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        return self.gamma_e_bar


@dataclass(frozen=True)
class RicianANGammaFit(EveSnrDistribution):
    """Gamma(shape, scale) stand-in for Eve's SNR, fitted by moments."""

    shape: float
    scale: float
    n_samples: int = 0
    sample_mean: float = float("nan")
    sample_var: float = float("nan")
    link: Optional[EveLink] = None
    branch = "rician-an-gamma"

    def sf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return specfun.reg_upper_gamma(self.shape, x / self.scale)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0, 0.0, specfun.reg_lower_gamma(self.shape, np.maximum(x, 0.0) / self.scale))
        return float(out) if out.ndim == 0 else out

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.shape, self.scale
        with np.errstate(divide="ignore"):
            logp = (a - 1.0) * np.log(np.maximum(x, 0) / b) - np.maximum(x, 0) / b - math.lgamma(a) - math.log(b)
        out = np.where(x < 0, 0.0, np.exp(logp))
        if a == 1.0:
            out = np.where(x == 0, 1.0 / b, out)
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        return self.shape * self.scale


@dataclass(frozen=True)
class RicianMRTBound(EveSnrDistribution):
    """Lower bound on Eve's SNR CDF under Rician fading with MRT.

    The true CDF depends on ``|zeta_e h_b^H|**2 / ||h_b||**2``; replacing it
    by its Cauchy-Schwarz maximum ``k`` gives a CDF that never exceeds the
    true one, hence an upper bound on leakage.
    """

    gamma_e_bar: float
    k_e: float
    k: int
    link: Optional[EveLink] = None
    branch = "rician-mrt-bound"
    has_pdf = False

    def _args(self, x):
        a = math.sqrt(2.0 * self.k * self.k_e)
        b = np.sqrt(2.0 * (1.0 + self.k_e) * np.maximum(np.asarray(x, dtype=float), 0.0) / self.gamma_e_bar)
        return a, b

    def sf(self, x):
        a, b = self._args(x)
        return specfun.marcum_q(1.0, a, b)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self._args(x)
        out = np.where(x < 0, 0.0, specfun.ncx2_cdf(2.0, a * a, b * b))
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        # Mean of the bounding law: c * (2 + lambda).
        return self.gamma_e_bar / (2.0 * (1.0 + self.k_e)) * (2.0 + 2.0 * self.k * self.k_e)


def eve_quantile(dist: EveSnrDistribution, p: float) -> float:
    """Quantile of Eve's SNR by bracketed bisection on the branch CDF.

    Upper-tail probabilities are solved on the survival function so that
    ``p`` close to 1 keeps its accuracy.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise specfun.DomainError(f"quantile requires 0 < p < 1, got {p!r}")
    hi = 1.0
    try:
        hi = max(hi, float(dist.mean()))
    except (NotImplementedError, ValueError):
        pass
    if p > 0.5:
        tail = 1.0 - p
        while float(dist.sf(hi)) > tail:
            hi *= 2.0
            if hi > 1e300:
                raise specfun.DomainError("quantile bracket overflow")
        return _bisect_increasing(lambda x: -float(dist.sf(x)), -tail, 0.0, hi)
    while float(dist.cdf(hi)) < p:
        hi *= 2.0
        if hi > 1e300:
            raise specfun.DomainError("quantile bracket overflow")
    return _bisect_increasing(lambda x: float(dist.cdf(x)), p, 0.0, hi)


def fit_gamma_moments(samples):
    """Method-of-moments Gamma fit: ``shape = mean**2/var``, ``scale = var/mean``.

    Raises
    ------
    FitError
        Fewer than two samples or non-positive variance/mean.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < 2:
        raise FitError("need at least two samples for a moment fit")
    mean = float(samples.mean())
    var = float(samples.var(ddof=1))
    if not var > 0 or not mean > 0:
        raise FitError(f"degenerate samples (mean={mean}, var={var})")
    return mean * mean / var, var / mean


def fit_from_samples(samples, link: Optional[EveLink] = None) -> RicianANGammaFit:
    samples = np.asarray(samples, dtype=float)
    shape, scale = fit_gamma_moments(samples)
    return RicianANGammaFit(shape, scale, int(samples.size), float(samples.mean()),
                            float(samples.var(ddof=1)), link)


def build_eve_distribution(params: SystemParams, mc_budget: int = 100_000,
                           rng: Optional[np.random.Generator] = None) -> EveSnrDistribution:
    """Analytical law of Eve's SNR for the scenario's fading and scheme.

    The Rician-AN branch is a Gamma fit to ``mc_budget`` simulated SNRs and
    therefore needs ``rng``; the other branches are exact (Rician-MRT is a
    bound) and ignore it.
    """
    link = params.eve_link
    ge = params.gamma_e_bar
    if not params.fading_e.is_rician:
        if params.scheme.is_mrt:
            return RayleighMRTEve(ge, link)
        return RayleighANEve(ge, params.alpha, int(params.k), link)
    if params.scheme.is_mrt:
        return RicianMRTBound(ge, params.fading_e.k_factor, int(params.k), link)
    if mc_budget < 10_000:
        raise InsufficientSamplesError(f"Gamma fit needs mc_budget >= 1e4, got {mc_budget}")
    if rng is None:
        raise ChannelError("Rician-AN Gamma fit requires an rng")
    return fit_from_samples(sample_eve_snr(link, int(mc_budget), rng), link)


# ------------------------------------------------ Bob's beamforming-free SNR

@dataclass(frozen=True)
class MainGainDistribution:
    """Law of ``gamma_b_tilde = gamma_b_bar * ||h_b||**2``.

    Rayleigh: Gamma(k, gamma_b_bar). Rician: ``c * chi2_nc(2k, 2kK)`` with
    ``c = gamma_b_bar / (2 (1 + K))``.
    """

    fading: FadingModel
    gamma_b_bar: float
    k: int

    @property
    def _c(self) -> float:
        return self.gamma_b_bar / (2.0 * (1.0 + self.fading.k_factor))

    @property
    def _lam(self) -> float:
        return 2.0 * self.k * self.fading.k_factor

    def cdf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        if not self.fading.is_rician:
            return specfun.reg_lower_gamma(self.k, x / self.gamma_b_bar)
        return specfun.ncx2_cdf(2.0 * self.k, self._lam, x / self._c)

    def sf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        if not self.fading.is_rician:
            return specfun.reg_upper_gamma(self.k, x / self.gamma_b_bar)
        return specfun.marcum_q(float(self.k), math.sqrt(self._lam), np.sqrt(x / self._c))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if not self.fading.is_rician:
            g = self.gamma_b_bar
            with np.errstate(divide="ignore"):
                logp = (self.k - 1) * np.log(np.maximum(x, 0)) - np.maximum(x, 0) / g - self.k * math.log(g) - math.lgamma(self.k)
            out = np.where(x < 0, 0.0, np.exp(logp))
            return float(out) if out.ndim == 0 else out
        out = specfun.ncx2_pdf(2.0 * self.k, self._lam, np.maximum(x, 0) / self._c) / self._c
        out = np.where(x < 0, 0.0, out)
        return float(out) if np.ndim(out) == 0 else out

    def mean(self) -> float:
        return self.k * self.gamma_b_bar

    def quantile(self, p: float) -> float:
        return eve_quantile(self, p)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        h = sample_fading(self.fading, self.k, rng, n)
        return self.gamma_b_bar * np.sum(np.abs(h) ** 2, axis=1)


def gamma_b_tilde_cdf(fading_b: FadingModel, gamma_b_bar: float, k: int, x):
    """CDF of Bob's beamforming-free SNR (Gamma or scaled nc-chi2)."""
    return MainGainDistribution(fading_b, gamma_b_bar, k).cdf(x)


def gamma_b_tilde_pdf(fading_b: FadingModel, gamma_b_bar: float, k: int, x):
    return MainGainDistribution(fading_b, gamma_b_bar, k).pdf(x)

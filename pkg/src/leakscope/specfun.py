"""Special functions used throughout the package.

Everything here is a pure function of its arguments. Functions accept
scalars or numpy arrays unless noted, and return a Python ``float`` for
scalar input.

The Marcum Q-function and the noncentral chi-squared CDF share one
Poisson-mixture kernel: a noncentral chi-squared variable with ``2*nu``
degrees of freedom and noncentrality ``a**2`` is a Poisson(a**2/2) mixture
of central Gamma(nu + j) variables, so both tails are sums of Poisson
weights times regularized incomplete gamma functions. The incomplete gamma
values are advanced across shapes by a recursion that only ever adds
positive terms.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc

__all__ = [
    "DomainError",
    "gaussian_q",
    "gaussian_q_inv",
    "ln_gamma",
    "reg_lower_gamma",
    "reg_upper_gamma",
    "bessel_i",
    "bessel_i_scaled",
    "bessel_i_recurrence",
    "marcum_q",
    "ncx2_cdf",
    "ncx2_sf",
    "ncx2_pdf",
]

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)
_EPS = 1e-16
_TINY = 1e-300

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


class DomainError(ValueError):
    """Argument outside the mathematical domain of a special function."""


def _out(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


# ---------------------------------------------------------------- Gaussian Q

def gaussian_q(x):
    """Gaussian tail probability Q(x) = P(Z > x) for a standard normal Z.

    Evaluated as ``erfc(x / sqrt(2)) / 2``; the complementary error function
    keeps full relative accuracy deep into the upper tail.
    """
    x = np.asarray(x, dtype=float)
    return _out(0.5 * erfc(x / _SQRT2))


def _normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT2PI


def _q_inv_tail(p: float) -> float:
    # Solves Q(x) = p for p <= 0.5, i.e. x >= 0.
    lo, hi = 0.0, 1.0
    while gaussian_q(hi) > p:
        lo, hi = hi, 2.0 * hi
        if hi > 64.0:
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gaussian_q(mid) > p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    x = 0.5 * (lo + hi)
    # Newton polish on log Q, which is nearly linear in the tail.
    log_p = math.log(p)
    for _ in range(4):
        q = gaussian_q(x)
        if q <= 0.0:
            break
        step = (math.log(q) - log_p) * q / -_normal_pdf(x)
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    return x


def gaussian_q_inv(p: float) -> float:
    """Inverse of :func:`gaussian_q` on the open interval (0, 1).

    Bracketed bisection followed by a Newton polish. Scalar only.

    Raises
    ------
    DomainError
        If ``p`` is not strictly between 0 and 1.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"gaussian_q_inv requires 0 < p < 1, got {p!r}")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return _q_inv_tail(p)
    return -_q_inv_tail(1.0 - p)


# ------------------------------------------------------------------- Gamma

def ln_gamma(x):
    """Natural log of the Gamma function for x > 0 (Lanczos, g=7)."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("ln_gamma requires x > 0")
    small = x < 0.5
    z = np.where(small, x + 1.0, x) - 1.0
    acc = np.full_like(z, _LANCZOS[0])
    for i, c in enumerate(_LANCZOS[1:], start=1):
        acc = acc + c / (z + i)
    t = z + _LANCZOS_G + 0.5
    res = 0.5 * math.log(2.0 * math.pi) + (z + 0.5) * np.log(t) - t + np.log(acc)
    res = np.where(small, res - np.log(x), res)
    return _out(res)


def _gamma_series(s, x, log_pref):
    # P(s, x) by the power series; valid and fast for x < s + 1.
    term = 1.0 / s
    total = term.copy()
    active = np.ones(s.shape, dtype=bool)
    n = 0.0
    while active.any() and n < 10000:
        n += 1.0
        term = np.where(active, term * x / (s + n), 0.0)
        total = total + term
        active = active & (np.abs(term) > _EPS * np.abs(total))
    return total * np.exp(log_pref)


def _gamma_cf(s, x, log_pref):
    # Q(s, x) by the modified Lentz continued fraction; for x >= s + 1.
    b = x + 1.0 - s
    c = np.full(s.shape, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(s.shape, dtype=bool)
    i = 0
    while active.any() and i < 10000:
        i += 1
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = np.where(active, d * c, 1.0)
        h = h * delta
        active = active & (np.abs(delta - 1.0) > _EPS)
    return np.exp(log_pref) * h


def _reg_gamma_pq(s, x):
    s, x = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(x, dtype=float))
    if np.any(~(s > 0)) or np.any(~(x >= 0)):
        raise DomainError("regularized incomplete gamma requires s > 0 and x >= 0")
    s = s.astype(float).ravel()
    x = x.astype(float).ravel()
    p = np.zeros_like(x)
    q = np.ones_like(x)
    pos = x > 0
    inf = np.isinf(x)
    p[inf], q[inf] = 1.0, 0.0
    pos &= ~inf
    if pos.any():
        sp, xp = s[pos], x[pos]
        with np.errstate(over="ignore", under="ignore"):
            log_pref = sp * np.log(xp) - xp - ln_gamma(sp)
            log_pref = np.asarray(log_pref, dtype=float)
            use_series = xp < sp + 1.0
            pp = np.empty_like(xp)
            qq = np.empty_like(xp)
            if use_series.any():
                ser = _gamma_series(sp[use_series], xp[use_series], log_pref[use_series])
                ser = np.clip(ser, 0.0, 1.0)
                pp[use_series], qq[use_series] = ser, 1.0 - ser
            cf_mask = ~use_series
            if cf_mask.any():
                cf = _gamma_cf(sp[cf_mask], xp[cf_mask], log_pref[cf_mask])
                cf = np.clip(cf, 0.0, 1.0)
                pp[cf_mask], qq[cf_mask] = 1.0 - cf, cf
        p[pos], q[pos] = pp, qq
    return p, q


def reg_lower_gamma(s, x):
    """Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s).

    Power series below ``x = s + 1``, Lentz continued fraction above.
    """
    shape = np.broadcast(np.asarray(s), np.asarray(x)).shape
    p, _ = _reg_gamma_pq(s, x)
    return _out(p.reshape(shape))


def reg_upper_gamma(s, x):
    """Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x).

    Computed directly (not as a difference) where it is the small tail.
    """
    shape = np.broadcast(np.asarray(s), np.asarray(x)).shape
    _, q = _reg_gamma_pq(s, x)
    return _out(q.reshape(shape))


# ------------------------------------------------------------------ Bessel I

def _log_bessel_i_series(nu: float, x: float) -> float:
    # log I_nu(x) from the ascending series, summed in log space.
    if x == 0.0:
        return 0.0 if nu == 0.0 else -math.inf
    half = 0.5 * x
    n_terms = int(half + 10.0 * math.sqrt(half) + 40.0)
    i = np.arange(n_terms, dtype=float)
    log_terms = (nu + 2.0 * i) * math.log(half) - ln_gamma(i + 1.0) - ln_gamma(nu + i + 1.0)
    top = log_terms.max()
    return float(top + math.log(np.exp(log_terms - top).sum()))


def _check_bessel_args(nu, x):
    if np.any(np.asarray(nu) < 0) or np.any(np.asarray(x) < 0):
        raise DomainError("bessel_i requires nu >= 0 and x >= 0")


def bessel_i_scaled(nu, x):
    """Exponentially scaled modified Bessel function ``exp(-x) * I_nu(x)``."""
    _check_bessel_args(nu, x)
    f = np.vectorize(lambda n, v: math.exp(_log_bessel_i_series(n, v) - v), otypes=[float])
    return _out(f(nu, x))


def bessel_i(nu, x):
    """Modified Bessel function of the first kind, I_nu(x), by its series.

    Raises
    ------
    OverflowError
        When I_nu(x) exceeds the double range; use :func:`bessel_i_scaled`.
    """
    _check_bessel_args(nu, x)

    def one(n, v):
        lg = _log_bessel_i_series(n, v)
        if lg > 709.0:
            raise OverflowError(f"I_{n}({v}) overflows double precision")
        return math.exp(lg)

    return _out(np.vectorize(one, otypes=[float])(nu, x))


def bessel_i_recurrence(nu: float, x: float) -> float:
    """I_nu(x) by Miller's backward recurrence over the order.

    The recurrence ``I_{mu-1} = I_{mu+1} + (2 mu / x) I_mu`` is run downward
    from a high order and normalized against the series value at the
    fractional base order ``nu - floor(nu)``. Independent of the series
    except at that single normalization point. Scalar only.
    """
    _check_bessel_args(nu, x)
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    n = int(math.floor(nu))
    frac = nu - n
    top = n + int(x) + 60
    above, cur = 0.0, 1e-30
    target = None
    for k in range(top, 0, -1):
        mu = frac + k
        below = above + (2.0 * mu / x) * cur
        above, cur = cur, below
        if k - 1 == n:
            target = cur
        if abs(cur) > 1e250:
            above *= 1e-250
            cur *= 1e-250
            if target is not None:
                target *= 1e-250
    if n == 0:
        target = cur
    base = math.exp(_log_bessel_i_series(frac, x))
    return target * base / cur


# ------------------------------------------------------- Marcum Q / nc-chi2

def _ncx_mixture(nu: float, lam_half: float, y: np.ndarray, want_lower: bool):
    """Poisson mixture of Gamma(nu + j) tails at ``y``.

    Returns ``(lower, upper)``; ``lower`` is None unless requested.
    """
    p0, q0 = _reg_gamma_pq(np.full_like(y, nu), y)
    if lam_half == 0.0:
        return (p0 if want_lower else None), q0

    with np.errstate(divide="ignore"):
        log_y = np.log(y)
    log_lam = math.log(lam_half)
    mode = int(lam_half)
    j_cap = mode + int(60.0 * math.sqrt(lam_half)) + 2000

    q_j = q0
    s_q = np.zeros_like(y)
    j = 0
    while True:
        log_w = -lam_half + j * log_lam - math.lgamma(j + 1.0)
        w = math.exp(log_w)
        s_q = s_q + w * q_j
        if j > lam_half:
            r = lam_half / (j + 1.0)
            tail = w * r / (1.0 - r)
            if tail < _TINY or np.all(tail <= 1e-15 * s_q):
                break
        if j >= j_cap:
            break
        shape = nu + j
        with np.errstate(under="ignore", invalid="ignore"):
            t = np.exp(shape * log_y - y - math.lgamma(shape + 1.0))
        t = np.where(y > 0, t, 0.0)
        q_j = q_j + t
        j += 1
    upper = np.minimum(s_q, 1.0)

    lower = None
    if want_lower:
        big_j = j
        p_j, _ = _reg_gamma_pq(np.full_like(y, nu + big_j), y)
        s_p = np.zeros_like(y)
        for jj in range(big_j, -1, -1):
            w = math.exp(-lam_half + jj * log_lam - math.lgamma(jj + 1.0))
            s_p = s_p + w * p_j
            if jj == 0:
                break
            shape = nu + jj - 1
            with np.errstate(under="ignore", invalid="ignore"):
                t = np.exp(shape * log_y - y - math.lgamma(shape + 1.0))
            t = np.where(y > 0, t, 0.0)
            p_j = p_j + t
        lower = np.minimum(s_p, 1.0)
    return lower, upper


def _mixture_broadcast(nu, a, b, want_lower):
    nu_a, a_a, b_a = np.broadcast_arrays(
        np.asarray(nu, dtype=float), np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    )
    if np.any(~(nu_a > 0)) or np.any(a_a < 0) or np.any(b_a < 0):
        raise DomainError("Marcum Q requires nu > 0, a >= 0, b >= 0")
    shape = b_a.shape
    flat_nu, flat_a, flat_b = nu_a.ravel(), a_a.ravel(), b_a.ravel()
    lower = np.empty(flat_b.shape)
    upper = np.empty(flat_b.shape)
    # Group by (nu, a) so the mixture loop runs once per distinct pair.
    pairs = np.stack([flat_nu, flat_a], axis=1) if flat_b.size else np.empty((0, 2))
    uniq, inverse = np.unique(pairs, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    for idx, (n, av) in enumerate(uniq):
        sel = inverse == idx
        y = 0.5 * flat_b[sel] ** 2
        lo, up = _ncx_mixture(float(n), 0.5 * float(av) ** 2, y, want_lower)
        upper[sel] = up
        if want_lower:
            lower[sel] = lo
    return lower.reshape(shape), upper.reshape(shape)


def marcum_q(nu, a, b):
    """Generalized Marcum Q-function Q_nu(a, b) for nu > 0, a, b >= 0.

    Equals the survival function of a noncentral chi-squared variable with
    ``2 nu`` degrees of freedom and noncentrality ``a**2`` at ``b**2``.
    """
    _, upper = _mixture_broadcast(nu, a, b, want_lower=False)
    return _out(upper)


def ncx2_cdf(dof, lam, x):
    """CDF of the noncentral chi-squared distribution, ``1 - Q_{dof/2}(sqrt(lam), sqrt(x))``.

    The lower tail is summed directly so small CDF values keep their
    relative accuracy. At ``lam = 0`` this is ``P(dof/2, x/2)``.
    """
    lam = np.asarray(lam, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(lam < 0) or np.any(x < 0):
        raise DomainError("ncx2_cdf requires lam >= 0 and x >= 0")
    lower, _ = _mixture_broadcast(np.asarray(dof, dtype=float) / 2.0, np.sqrt(lam), np.sqrt(x), True)
    return _out(lower)


def ncx2_sf(dof, lam, x):
    """Survival function of the noncentral chi-squared distribution."""
    lam = np.asarray(lam, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(lam < 0) or np.any(x < 0):
        raise DomainError("ncx2_sf requires lam >= 0 and x >= 0")
    return marcum_q(np.asarray(dof, dtype=float) / 2.0, np.sqrt(lam), np.sqrt(x))


def _ncx2_pdf_scalar(dof: float, lam: float, x: float) -> float:
    order = 0.5 * dof - 1.0
    if x < 0.0:
        return 0.0
    if lam == 0.0 or x == 0.0:
        # Central density; the Bessel form is 0/0 at lam = 0 and has the
        # same limit at x = 0.
        if x == 0.0:
            if dof < 2.0:
                return math.inf
            if dof > 2.0:
                return 0.0
            return 0.5 * math.exp(-0.5 * lam)
        k2 = 0.5 * dof
        return math.exp((k2 - 1.0) * math.log(x) - 0.5 * x - k2 * math.log(2.0) - math.lgamma(k2))
    z = math.sqrt(lam * x)
    log_i = _log_bessel_i_series(abs(order), z)
    if order < 0 and order != int(order):
        # I_{-v} differs from I_v for non-integer v; fall back to the series
        # with a negative order (dof < 2 only).
        half = 0.5 * z
        n_terms = int(half + 10.0 * math.sqrt(half) + 40.0)
        i = np.arange(n_terms, dtype=float)
        terms = np.exp((order + 2 * i) * math.log(half) - ln_gamma(i + 1.0)
                       - np.array([math.lgamma(order + k + 1.0) for k in i]))
        log_i = math.log(terms.sum())
    log_pdf = (math.log(0.5) - 0.5 * (x + lam)
               + (0.5 * order) * (math.log(x) - math.log(lam)) + log_i)
    return math.exp(log_pdf)


def ncx2_pdf(dof, lam, x):
    """Density of the noncentral chi-squared distribution (Bessel form).

    ``lam = 0`` is routed to the central chi-squared density.
    """
    if np.any(np.asarray(lam) < 0):
        raise DomainError("ncx2_pdf requires lam >= 0")
    f = np.vectorize(_ncx2_pdf_scalar, otypes=[float])
    return _out(f(dof, lam, x))

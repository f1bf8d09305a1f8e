"""Quick identity and oracle checks runnable from the command line."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np
from scipy import stats

from .. import specfun
from ..channel import (
    RayleighANEve,
    RayleighMRTEve,
    RicianANGammaFit,
    RicianMRTBound,
    SystemParams,
    BeamformingScheme,
    build_eve_distribution,
)
from ..leakage import (
    FblOperatingPoint,
    ail_closed_form,
    ail_exact,
    ail_mc,
    ail_saddlepoint,
    dispersion,
    laplace_internals_check,
    sop,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _random_dist(rng: np.random.Generator, branch: int):
    ge = float(10 ** rng.uniform(-1, 2))
    if branch == 0:
        return RayleighANEve(ge, float(rng.uniform(0.05, 1.0)), int(rng.integers(2, 9)))
    if branch == 1:
        return RayleighMRTEve(ge)
    if branch == 2:
        shape = float(rng.uniform(0.5, 8))
        return RicianANGammaFit(shape, ge / shape, 0, ge, ge * ge / shape)
    return RicianMRTBound(ge, float(rng.uniform(0, 10)), int(rng.integers(1, 9)))


def _random_point(rng: np.random.Generator) -> FblOperatingPoint:
    return FblOperatingPoint(float(10 ** rng.uniform(-1, 3)), int(rng.integers(50, 2001)),
                             float(rng.integers(1, 300)), float(10 ** rng.uniform(-6, -0.5)))


def check_identity(rng, draws=250) -> Tuple[bool, str]:
    worst = 0.0
    for i in range(draws):
        for b in range(4):
            d = _random_dist(rng, b)
            p = _random_point(rng)
            worst = max(worst, abs(ail_closed_form(p, d).value - ail_saddlepoint(p, d).value))
    return worst <= 1e-12, f"max |closed - saddle| = {worst:.2e}"


def check_sop(rng, draws=250) -> Tuple[bool, str]:
    worst = 0.0
    for _ in range(draws):
        d = _random_dist(rng, int(rng.integers(0, 4)))
        p = _random_point(rng)
        # Rate terms grouped as the library groups them, so that both sides
        # see the same rounding of the threshold.
        re = math.log2(1 + p.gamma_b) - (math.sqrt(dispersion(p.gamma_b) / p.n)
                                         * specfun.gaussian_q_inv(p.epsilon) + p.m / p.n)
        worst = max(worst, abs(sop(re, d) - ail_saddlepoint(p, d).value))
    return worst <= 1e-14, f"max |sop - saddle| = {worst:.2e}"


def check_mc(rng) -> Tuple[bool, str]:
    worst = 0.0
    for alpha in (0.7, 1.0):
        params = SystemParams(scheme=BeamformingScheme(alpha))
        d = build_eve_distribution(params)
        p = FblOperatingPoint(params.gamma_b, params.n, params.m, params.epsilon)
        e = ail_exact(p, d).value
        mc = ail_mc(p, d, 100_000, rng)
        worst = max(worst, abs(e - mc.value) / mc.std_error)
    return worst <= 3.0, f"max |exact - mc| / s.e. = {worst:.2f}"


def check_laplace(rng, draws=50) -> Tuple[bool, str]:
    worst = 0.0
    for _ in range(draws):
        d = _random_dist(rng, int(rng.integers(0, 3)))
        while True:
            p = _random_point(rng)
            from ..leakage import x0

            if x0(p) > 1e-3:
                break
        diag = laplace_internals_check(p, d)
        worst = max(worst, abs(diag.product - diag.tail))
    return worst <= 1e-10, f"max |product - tail| = {worst:.2e}"


def check_marcum(rng, draws=200) -> Tuple[bool, str]:
    worst = 0.0
    for _ in range(draws):
        nu = float(rng.uniform(0.5, 10))
        a = float(rng.uniform(0, 10))
        b = float(rng.uniform(0, 15))
        ref = stats.ncx2.sf(b * b, 2 * nu, a * a)
        if ref > 1e-280:
            worst = max(worst, abs(specfun.marcum_q(nu, a, b) - ref) / max(ref, 1e-300))
    return worst <= 1e-8, f"max relative error vs scipy = {worst:.2e}"


CHECKS: List[Tuple[str, Callable]] = [
    ("closed-form identity", check_identity),
    ("sop equivalence", check_sop),
    ("exact vs monte carlo", check_mc),
    ("laplace internals", check_laplace),
    ("marcum q vs scipy", check_marcum),
]


def run_selfcheck(seed: int) -> List[CheckResult]:
    out = []
    for i, (name, fn) in enumerate(CHECKS):
        rng = np.random.Generator(np.random.Philox(key=[int(seed), 1000 + i]))
        t0 = time.perf_counter()
        ok, detail = fn(rng)
        out.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return out

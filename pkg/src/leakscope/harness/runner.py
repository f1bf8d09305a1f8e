"""Scenario execution: grid expansion, per-point evaluation, provenance.

Every grid point draws from its own Philox stream keyed by
``(seed, 16 * point_index + purpose)``, so results do not depend on the
order in which points are evaluated or on the number of workers.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .. import __version__
from ..channel import (
    FadingModel,
    MainGainDistribution,
    RicianMRTBound,
    SystemParams,
    build_eve_distribution,
    fit_from_samples,
    sample_eve_snr,
    sample_fading,
)
from ..design import (
    DesignConfig,
    EveFamily,
    ast_adaptive_integral,
    ast_surface,
    solve_adaptive,
    solve_nonadaptive,
)
from ..leakage import (
    FblOperatingPoint,
    ail_closed_form,
    ail_exact,
    ail_highsnr,
    ail_mc,
    ail_saddlepoint,
)
from ..specfun import ncx2_cdf
from .config import ConfigError, ScenarioConfig, SweepAxis, build_params, parse_sweep, resolve_params

RNG_NAME = "numpy.random.Philox (4x64, key = [seed, 16 * point + purpose])"
NA = None

# Stream purposes within a grid point.
_FIT, _MC, _VALIDATE, _SLOTS, _LAWS = 0, 1, 2, 3, 4


class TooFewSamplesError(ValueError):
    """An empirical distribution needs more samples."""


Cell = object


@dataclass
class ResultTable:
    """Rows of plain cells plus a provenance block.

    Cells are ``int``, ``float``, ``str`` or ``None`` (not applicable).
    ``provenance`` maps keys to single-line strings and carries the full
    resolved configuration, the seed and the package version.
    """

    columns: Tuple[str, ...]
    rows: List[Tuple[Cell, ...]] = field(default_factory=list)
    provenance: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        clean = []
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row has {len(row)} cells, schema has {len(self.columns)}")
            clean.append(tuple(_cell(v) for v in row))
        self.rows = clean

    def column(self, name: str) -> List[Cell]:
        j = self.columns.index(name)
        return [r[j] for r in self.rows]

    def meta(self, key: str) -> Optional[str]:
        return self.provenance.get(key)


def _cell(v) -> Cell:
    if v is None:
        return None
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return None if math.isnan(f) else f
    if isinstance(v, str):
        return v
    raise TypeError(f"unsupported cell type {type(v).__name__}")


def ecdf_ks(samples, cdf: Callable) -> float:
    """Sup-norm distance between the empirical CDF of ``samples`` and ``cdf``.

    Raises
    ------
    TooFewSamplesError
        With fewer than 100 samples.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < 100:
        raise TooFewSamplesError(f"ecdf_ks needs at least 100 samples, got {samples.size}")
    return float(stats.kstest(samples, lambda x: np.asarray(cdf(x), dtype=float)).statistic)


def point_rng(seed: int, index: int, purpose: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[int(seed), 16 * int(index) + int(purpose)]))


# ------------------------------------------------------------- defaults

DEFAULT_SWEEPS: Dict[str, Tuple[Tuple[str, str], ...]] = {
    "fig2": (("rho", "0,10,20:dB"),),
    "fig3": (("epsilon", "1e-5:0.4:15:log"),),
    "fig4": (("rho", "-10:40:11:dB"),),
    "fig7": (("m", "50,100,150,200"),),
}


def resolved_sweep(cfg: ScenarioConfig) -> Tuple[SweepAxis, ...]:
    axes = {name: parse_sweep(name, spec) for name, spec in DEFAULT_SWEEPS.get(cfg.experiment, ())}
    for axis in cfg.sweep:
        axes[axis.name] = axis
    return tuple(axes.values())


def _design_config(cfg: ScenarioConfig, params: SystemParams, index: int) -> DesignConfig:
    return DesignConfig.from_params(params, seed=int(cfg.seed), n_min=cfg.n_min,
                                    alpha_points=cfg.alpha_points, alpha_grid=cfg.alpha_grid,
                                    mc_budget=max(int(cfg.mc_samples), 10_000))


# ------------------------------------------------------------ evaluators
# Each evaluator maps (cfg, point index, parameter values) to
# (columns, rows, meta).

def _eve_dist(params: SystemParams, cfg: ScenarioConfig, index: int):
    return build_eve_distribution(params, max(int(cfg.mc_samples), 10_000),
                                  point_rng(cfg.seed, index, _FIT))


def _estimates(params: SystemParams, cfg: ScenarioConfig, index: int, methods: Sequence[str]):
    dist = _eve_dist(params, cfg, index)
    point = FblOperatingPoint(params.gamma_b, params.n, params.m, params.epsilon)
    out: Dict[str, Cell] = {}
    for m in methods:
        if m == "exact":
            out["ail_exact"] = ail_exact(point, dist).value if dist.has_pdf else NA
        elif m == "saddle":
            out["ail_saddle"] = ail_saddlepoint(point, dist).value
        elif m == "closed":
            out["ail_closed"] = ail_closed_form(point, dist).value
        elif m == "highsnr":
            out["ail_highsnr"] = ail_highsnr(dist, params.gamma_b, params.n, params.m, params.epsilon).value
        elif m == "mc":
            est = ail_mc(point, dist, int(cfg.mc_samples), point_rng(cfg.seed, index, _MC))
            out["ail_mc"] = est.value
            out["mc_stderr"] = est.std_error
    return out


def _columns_for(methods: Sequence[str]) -> Tuple[str, ...]:
    cols = []
    for m in methods:
        cols.append(f"ail_{m}")
        if m == "mc":
            cols.append("mc_stderr")
    return tuple(cols)


def eval_custom(cfg, index, values):
    params = build_params(values)
    cols = _columns_for(cfg.methods)
    est = _estimates(params, cfg, index, cfg.methods)
    return cols, [tuple(est[c] for c in cols)], {}


def eval_fig2(cfg, index, values):
    params = build_params(values)
    if not (params.fading_e.is_rician and not params.scheme.is_mrt):
        raise ConfigError("fig2: needs fading_e = rician and scheme = an")
    link = params.eve_link
    fit = fit_from_samples(sample_eve_snr(link, int(cfg.mc_samples), point_rng(cfg.seed, index, _FIT)), link)
    check = sample_eve_snr(link, int(cfg.mc_samples), point_rng(cfg.seed, index, _VALIDATE))
    ks = ecdf_ks(check, fit.cdf)
    xs = np.quantile(check, np.linspace(0.0, 0.995, 41))
    srt = np.sort(check)
    ecdf = np.searchsorted(srt, xs, side="right") / srt.size
    cols = ("x", "ecdf", "gamma_cdf", "ks", "shape", "scale")
    rows = [(float(x), float(e), float(fit.cdf(x)), ks, fit.shape, fit.scale) for x, e in zip(xs, ecdf)]
    return cols, rows, {}


def eval_fig3(cfg, index, values):
    params = build_params(values)
    est = _estimates(params, cfg, index, ("exact", "saddle", "mc"))
    cols = ("ail_exact", "ail_saddle", "ail_mc", "mc_stderr")
    return cols, [tuple(est[c] for c in cols)], {}


_BRANCHES = (("rayleigh-an", "rayleigh", "an"), ("rayleigh-mrt", "rayleigh", "mrt"),
             ("rician-an", "rician", "an"), ("rician-mrt", "rician", "mrt"))


def eval_fig4(cfg, index, values):
    cols = ("branch", "ail_exact", "ail_saddle", "ail_highsnr", "ail_mc", "mc_stderr")
    rows = []
    for b, (name, fading, scheme) in enumerate(_BRANCHES):
        v = dict(values, fading_b=fading, fading_e=fading, scheme=scheme)
        params = build_params(v)
        est = _estimates(params, cfg, 4 * index + b, ("exact", "saddle", "highsnr", "mc"))
        rows.append((name,) + tuple(est[c] for c in cols[1:]))
    return cols, rows, {}


def eval_fig5(cfg, index, values):
    params = build_params(values)
    dcfg = _design_config(cfg, params, index)
    family = EveFamily(params, dcfg.mc_budget, point_rng(cfg.seed, index, _FIT))
    main = MainGainDistribution(params.fading_b, params.gamma_b_bar, int(params.k))
    gains = np.sort(main.sample(point_rng(cfg.seed, index, _SLOTS), int(params.slots)))
    ex = solve_adaptive(gains, params, dcfg, "exhaustive", family)
    rl = solve_adaptive(gains, params, dcfg, "relaxed", family)
    cols = ("slot", "norm_sq", "gamma_b_tilde", "n_opt", "alpha_opt", "ist", "feasible",
            "n_relaxed", "alpha_relaxed", "ist_relaxed")
    rows = []
    for i, (e, r) in enumerate(zip(ex.per_slot, rl.per_slot)):
        rows.append((i, e.gamma_b_tilde / params.gamma_b_bar, e.gamma_b_tilde, e.n_opt,
                     e.alpha_opt, e.ist, e.feasible, r.n_opt, r.alpha_opt, r.ist))
    meta = {"ast_exhaustive": repr(ex.ast), "ast_relaxed": repr(rl.ast),
            "ast_integral": repr(ast_adaptive_integral(params, dcfg, family))}
    return cols, rows, meta


def eval_fig6(cfg, index, values):
    params = build_params(values)
    dcfg = _design_config(cfg, params, index)
    family = EveFamily(params, dcfg.mc_budget, point_rng(cfg.seed, index, _FIT))
    ns = np.arange(10, params.n_max + 1, 10)
    alphas = np.ones(1) if params.scheme.is_mrt else np.round(np.arange(1, 51) * 0.02, 12)
    surf = ast_surface(ns, alphas, params, dcfg, family)
    best = solve_nonadaptive(params, dcfg, family)
    cols = ("n", "alpha", "ast")
    rows = [(int(n), float(a), float(surf[i, j])) for i, a in enumerate(alphas) for j, n in enumerate(ns)]
    meta = {"argmax_n": str(best.n_opt), "argmax_alpha": repr(best.alpha_opt), "argmax_ast": repr(best.ast)}
    return cols, rows, meta


def eval_fig7(cfg, index, values):
    params = build_params(values)
    dcfg = _design_config(cfg, params, index)
    family = EveFamily(params, dcfg.mc_budget, point_rng(cfg.seed, index, _FIT))
    best = solve_nonadaptive(params, dcfg, family)
    return ("n_opt", "alpha_opt", "ast"), [(best.n_opt, best.alpha_opt, best.ast)], {}


def projection_samples(k: int, n: int, rng: np.random.Generator):
    """``|x b^H|**2`` for standard complex normal rows ``x`` and one fixed ``b``."""
    b = sample_fading(FadingModel.rayleigh(), k, rng)
    x = sample_fading(FadingModel.rayleigh(), k, rng, n)
    return np.abs(x @ np.conj(b)) ** 2, float(np.sum(np.abs(b) ** 2))


def shifted_normal_samples(dof: int, lam: float, n: int, rng: np.random.Generator):
    """Sums of squared unit-variance normals with means spreading ``lam`` evenly."""
    mu = np.full(dof, math.sqrt(lam / dof))
    return np.sum((rng.standard_normal((n, dof)) + mu) ** 2, axis=1)


def eval_validate(cfg, index, values):
    params = build_params(values)
    n = int(cfg.mc_samples)
    k = int(params.k)
    rows = []
    s1, scale = projection_samples(k, n, point_rng(cfg.seed, index, _LAWS))
    rows.append(("projection-exponential", ecdf_ks(s1, lambda x: -np.expm1(-np.maximum(x, 0) / scale)), n, 0.02))
    lam = 2.0 * k * (params.fading_b.k_factor if params.fading_b.is_rician else 5.0)
    s2 = shifted_normal_samples(2 * k, lam, n, point_rng(cfg.seed, index, _LAWS + 8))
    rows.append(("shifted-normal-ncx2", ecdf_ks(s2, lambda x: ncx2_cdf(2.0 * k, lam, x)), n, 0.02))
    main = MainGainDistribution(params.fading_b, params.gamma_b_bar, k)
    rows.append((f"main-gain-{params.fading_b.kind}",
                 ecdf_ks(main.sample(point_rng(cfg.seed, index, _SLOTS), n), main.cdf), n, 0.02))
    dist = _eve_dist(params, cfg, index)
    eve = sample_eve_snr(params.eve_link, n, point_rng(cfg.seed, index, _VALIDATE))
    # The Rician-MRT law is only a bound, so no pass limit applies there.
    limit = NA if isinstance(dist, RicianMRTBound) else 0.02
    rows.append((f"eve-{dist.branch}", ecdf_ks(eve, dist.cdf), n, limit))
    out = [(c, ks, m, lim, NA if lim is None else int(ks <= lim)) for c, ks, m, lim in rows]
    return ("check", "ks", "n_samples", "limit", "pass"), out, {}


EVALUATORS: Dict[str, Callable] = {
    "custom": eval_custom,
    "fig2": eval_fig2,
    "fig3": eval_fig3,
    "fig4": eval_fig4,
    "fig5": eval_fig5,
    "fig6": eval_fig6,
    "fig7": eval_fig7,
    "validate": eval_validate,
    "adaptive": eval_fig5,
    "nonadaptive": eval_fig7,
}


# ------------------------------------------------------------ execution

def _grid(axes: Sequence[SweepAxis]):
    if not axes:
        return [((), {})]
    combos = itertools.product(*[list(zip(a.shown, a.values)) for a in axes])
    return [(tuple(s for s, _ in c), {a.name: v for a, (_, v) in zip(axes, c)}) for c in combos]


def _run_point(args):
    cfg, index, point = args
    values = resolve_params(cfg, point)
    return EVALUATORS[cfg.experiment](cfg, index, values)


def run_scenario(cfg: ScenarioConfig, timestamp: Optional[str] = None) -> ResultTable:
    """Evaluate a scenario over its sweep grid.

    Deterministic for a fixed configuration and seed; with ``workers > 1``
    points run in a process pool and are gathered in grid order.
    """
    axes = resolved_sweep(cfg)
    grid = _grid(axes)
    # Fail on bad parameters before any heavy work.
    for _, point in grid:
        build_params(resolve_params(cfg, point))
    jobs = [(cfg, i, point) for i, (_, point) in enumerate(grid)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(j) for j in jobs]

    columns = tuple(a.column for a in axes) + tuple(results[0][0])
    rows = []
    meta: Dict[str, str] = {}
    for (shown, _), (cols, point_rows, point_meta) in zip(grid, results):
        rows.extend(tuple(shown) + tuple(r) for r in point_rows)
        for key, value in point_meta.items():
            label = key if len(grid) == 1 else f"{key}[{'|'.join(repr(s) for s in shown)}]"
            meta[label] = value
    record = cfg.as_record()
    for axis in axes:
        record[f"sweep.{axis.name}"] = axis.to_text()
    provenance = {
        "experiment": cfg.experiment,
        "leakscope_version": __version__,
        "seed": str(int(cfg.seed)),
        "rng": RNG_NAME,
        "config": json.dumps(record, sort_keys=True),
        "params": json.dumps(resolve_params(cfg), sort_keys=True),
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    provenance.update(meta)
    return ResultTable(columns, rows, provenance)


def config_from_provenance(table: ResultTable) -> ScenarioConfig:
    """Rebuild the configuration recorded in a table's provenance block."""
    from .config import from_mapping

    record = json.loads(table.provenance["config"])
    return from_mapping([(k, str(v)) for k, v in record.items()], ScenarioConfig())

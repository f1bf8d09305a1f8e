"""SVG figures for result tables (matplotlib, imported lazily)."""

from __future__ import annotations

from typing import Dict, List

import numpy as np

from .runner import ResultTable


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update({
        "font.size": 9,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "legend.fontsize": 8,
        "svg.hashsalt": "leakscope",
    })
    return plt


def _col(table: ResultTable, name: str) -> np.ndarray:
    return np.array([np.nan if v is None else v for v in table.column(name)], dtype=float)


def _positive(y: np.ndarray) -> np.ndarray:
    return np.where(y > 0, y, np.nan)


def _groups(table: ResultTable, key: str) -> Dict[object, List[int]]:
    out: Dict[object, List[int]] = {}
    for i, v in enumerate(table.column(key)):
        out.setdefault(v, []).append(i)
    return out


def _fig2(table, plt):
    fig, ax = plt.subplots(figsize=(5, 3.6))
    axis = table.columns[0]
    for g, idx in _groups(table, axis).items():
        x = _col(table, "x")[idx]
        line, = ax.plot(x, _col(table, "ecdf")[idx], "-", label=f"{axis}={g:.3g} sim.")
        ax.plot(x, _col(table, "gamma_cdf")[idx], "o", ms=3, color=line.get_color(),
                mfc="none", label=f"{axis}={g:.3g} Gamma fit")
    ax.set_xscale("log")
    ax.set_xlabel("x")
    ax.set_ylabel("CDF of Eve's SNR")
    ax.legend(ncol=2)
    return fig


def _fig3(table, plt):
    fig, ax = plt.subplots(figsize=(5, 3.6))
    x = _col(table, table.columns[0])
    ax.plot(x, _positive(_col(table, "ail_saddle")), "-", label="saddle point")
    ax.plot(x, _positive(_col(table, "ail_exact")), "s", mfc="none", label="exact")
    ax.errorbar(x, _positive(_col(table, "ail_mc")), yerr=3 * _col(table, "mc_stderr"),
                fmt="x", label="Monte Carlo (3 s.e.)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(table.columns[0])
    ax.set_ylabel("AIL")
    ax.legend()
    return fig


def _fig4(table, plt):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    axis = table.columns[0]
    for b, idx in _groups(table, "branch").items():
        x = _col(table, axis)[idx]
        line, = ax.plot(x, _positive(_col(table, "ail_saddle")[idx]), "-", label=f"{b} approx.")
        c = line.get_color()
        ax.plot(x, _positive(_col(table, "ail_exact")[idx]), "o", mfc="none", color=c)
        ax.plot(x, _positive(_col(table, "ail_highsnr")[idx]), ":", color=c)
    ax.set_yscale("log")
    ax.set_xlabel(axis)
    ax.set_ylabel("AIL (markers exact, dotted high SNR)")
    ax.legend()
    return fig


def _fig5(table, plt):
    fig, axes = plt.subplots(3, 1, figsize=(5, 6), sharex=True)
    x = _col(table, "norm_sq")
    for ax, (col, alt, label) in zip(axes, (("ist", "ist_relaxed", "IST"),
                                            ("n_opt", "n_relaxed", "N*"),
                                            ("alpha_opt", "alpha_relaxed", "alpha*"))):
        ax.plot(x, _col(table, col), "-", label="exhaustive")
        ax.plot(x, _col(table, alt), "--", label="relaxed")
        ax.set_ylabel(label)
    axes[0].legend()
    axes[-1].set_xlabel("||h_b||^2")
    return fig


def _fig6(table, plt):
    n = _col(table, "n")
    a = _col(table, "alpha")
    z = _col(table, "ast")
    ns, alphas = np.unique(n), np.unique(a)
    grid = np.full((alphas.size, ns.size), np.nan)
    grid[np.searchsorted(alphas, a), np.searchsorted(ns, n)] = z
    fig, ax = plt.subplots(figsize=(5.5, 4))
    mesh = ax.pcolormesh(ns, alphas, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="AST (bpcu)")
    n_opt, a_opt = table.meta("argmax_n"), table.meta("argmax_alpha")
    if n_opt is not None and a_opt is not None:
        ax.plot(float(n_opt), float(a_opt), "r*", ms=10, label=f"max at N={n_opt}, alpha={float(a_opt):.3f}")
        ax.legend(loc="lower right")
    ax.set_xlabel("N")
    ax.set_ylabel("alpha")
    ax.grid(False)
    return fig


def _fig7(table, plt):
    fig, axes = plt.subplots(3, 1, figsize=(5, 6), sharex=True)
    x = _col(table, table.columns[0])
    for ax, col, label in zip(axes, ("n_opt", "alpha_opt", "ast"), ("N*", "alpha*", "AST (bpcu)")):
        ax.plot(x, _col(table, col), "o-")
        ax.set_ylabel(label)
    axes[-1].set_xlabel(table.columns[0])
    return fig


def _validate(table, plt):
    fig, ax = plt.subplots(figsize=(5.5, 3.2))
    names = [str(v) for v in table.column("check")]
    ax.barh(names, _col(table, "ks"))
    ax.axvline(0.02, color="k", ls="--", lw=0.8)
    ax.set_xlabel("KS distance")
    fig.tight_layout()
    return fig


def _generic(table, plt):
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ys = [c for c in table.columns if c.startswith("ail_")]
    if not table.rows or not ys:
        ax.text(0.5, 0.5, "no numeric series", ha="center", va="center")
        return fig
    first = table.columns[0]
    x = _col(table, first) if first not in ys else np.arange(len(table.rows), dtype=float)
    for c in ys:
        ax.plot(x, _positive(_col(table, c)), "o-", label=c[4:])
    ax.set_yscale("log")
    ax.set_xlabel(first if first not in ys else "row")
    ax.set_ylabel("AIL")
    ax.legend()
    return fig


_RENDERERS = {"fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5,
              "fig6": _fig6, "fig7": _fig7, "validate": _validate,
              "adaptive": _fig5, "nonadaptive": _fig7}


def render(table: ResultTable, path: str) -> str:
    """Draw the figure for ``table`` into the SVG file ``path``."""
    plt = _pyplot()
    fn = _RENDERERS.get(table.provenance.get("experiment", ""), _generic)
    fig = fn(table, plt)
    fig.tight_layout()
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    finally:
        plt.close(fig)
    return path

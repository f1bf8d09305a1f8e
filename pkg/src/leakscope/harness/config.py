"""Scenario configuration: flat ``key = value`` files and ``--set`` overrides.

Grammar
-------
One assignment per line, ``key = value``. Blank lines and lines starting
with ``#`` are ignored, as is anything after an unquoted `` #``. Keys are
case-sensitive and unknown keys are errors.

Scenario keys: ``experiment``, ``seed``, ``mc_samples``, ``out``,
``methods`` (comma list), ``workers``, ``n_min``, ``alpha_points``,
``alpha_grid``.

System keys (linear units): ``k``, ``rho``, ``beta_b``, ``beta_e``,
``distance_b``, ``distance_e``, ``eta_b``, ``eta_e``, ``fading_b``,
``fading_e`` (``rayleigh`` or ``rician``), ``k_b``, ``k_e``, ``scheme``
(``an`` or ``mrt``), ``alpha``, ``m``, ``n``, ``epsilon``, ``phi``,
``n_max``, ``slots``, ``main_gain``. The keys ``rho_db``, ``k_b_db`` and
``k_e_db`` give the same quantities in dB and are converted here, the only
place where dB values exist.

Sweeps: ``sweep.<key> = start:stop:num[:scale]`` with scale ``linear``
(default), ``log`` (geometric spacing) or ``dB`` (evenly spaced in dB,
converted to linear), or an explicit list ``sweep.<key> = v1,v2,...``.
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..channel import BeamformingScheme, ChannelError, FadingModel, LinkGeometry, SystemParams

DEFAULT_SEED = 2024
SEED_ENV = "LEAKSCOPE_SEED"

EXPERIMENTS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "custom", "validate",
               "adaptive", "nonadaptive")
METHODS = ("exact", "saddle", "closed", "highsnr", "mc")
SCALES = ("linear", "log", "dB")

_INT_KEYS = {"k", "n_max", "slots", "n"}
_FLOAT_KEYS = {"rho", "beta_b", "beta_e", "distance_b", "distance_e", "eta_b", "eta_e",
               "k_b", "k_e", "alpha", "m", "epsilon", "phi", "main_gain"}
_CHOICE_KEYS = {"fading_b": ("rayleigh", "rician"), "fading_e": ("rayleigh", "rician"),
                "scheme": ("an", "mrt")}
_DB_KEYS = {"rho_db": "rho", "k_b_db": "k_b", "k_e_db": "k_e"}
PARAM_KEYS = tuple(sorted(_INT_KEYS | _FLOAT_KEYS | set(_CHOICE_KEYS)))
SWEEPABLE = tuple(sorted(_INT_KEYS | _FLOAT_KEYS))
SCENARIO_KEYS = ("experiment", "seed", "mc_samples", "out", "methods", "workers",
                 "n_min", "alpha_points", "alpha_grid")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(value, dtype=float))


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        seed = int(raw, 0)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV}: not an integer: {raw!r}") from exc
    return _check_seed(seed, SEED_ENV)


def _check_seed(seed: int, name: str = "seed") -> int:
    if not 0 <= seed < 2 ** 64:
        raise ConfigError(f"{name}: must be an unsigned 64-bit integer, got {seed}")
    return seed


@dataclass(frozen=True)
class SweepAxis:
    """One sweep dimension; ``values`` are linear, ``shown`` is what the table prints."""

    name: str
    values: Tuple[float, ...]
    scale: str = "linear"
    spec: str = ""

    @property
    def column(self) -> str:
        return f"{self.name}_db" if self.scale == "dB" else self.name

    @property
    def shown(self) -> Tuple[float, ...]:
        if self.scale == "dB":
            return tuple(float(v) for v in linear_to_db(self.values))
        return self.values

    def to_text(self) -> str:
        return self.spec or ",".join(repr(v) for v in self.values)


def parse_sweep(name: str, text: str) -> SweepAxis:
    """Parse ``start:stop:num[:scale]`` or ``v1,v2,...[:scale]``."""
    if name not in SWEEPABLE:
        raise ConfigError(f"sweep.{name}: not a sweepable parameter (choose from {', '.join(SWEEPABLE)})")
    text = text.strip()
    scale = "linear"
    parts = text.split(":")
    if parts[-1].strip() in SCALES:
        scale = parts.pop().strip()
    try:
        if len(parts) == 1:
            raw = [float(v) for v in parts[0].split(",") if v.strip()]
        elif len(parts) == 3:
            start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
            if num < 1:
                raise ConfigError(f"sweep.{name}: num must be >= 1")
            if scale == "log":
                if start <= 0 or stop <= 0:
                    raise ConfigError(f"sweep.{name}: log scale needs positive bounds")
                raw = list(np.geomspace(start, stop, num))
            else:
                raw = list(np.linspace(start, stop, num))
        else:
            raise ConfigError(f"sweep.{name}: expected start:stop:num[:scale] or a comma list, got {text!r}")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"sweep.{name}: bad number in {text!r}") from exc
    if not raw:
        raise ConfigError(f"sweep.{name}: empty sweep")
    values = db_to_linear(raw) if scale == "dB" else np.asarray(raw, dtype=float)
    if name in _INT_KEYS:
        values = np.round(values)
    return SweepAxis(name, tuple(float(v) for v in values), scale, text)


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved experiment description.

    ``params`` holds system overrides in linear units; experiment defaults
    are merged underneath them by :func:`resolve_params`.
    """

    experiment: str = "custom"
    params: Mapping[str, object] = field(default_factory=dict)
    sweep: Tuple[SweepAxis, ...] = ()
    mc_samples: int = 100_000
    seed: int = DEFAULT_SEED
    out: str = "."
    methods: Tuple[str, ...] = ("exact", "saddle", "mc")
    workers: int = 1
    n_min: int = 50
    alpha_points: int = 200
    alpha_grid: float = 1e-3

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment: unknown {self.experiment!r} (choose from {', '.join(EXPERIMENTS)})")
        _check_seed(int(self.seed))
        if self.mc_samples < 1000:
            raise ConfigError(f"mc_samples: must be >= 1000, got {self.mc_samples}")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"methods: unknown {m!r} (choose from {', '.join(METHODS)})")
        if self.workers < 1:
            raise ConfigError(f"workers: must be >= 1, got {self.workers}")
        if self.n_min < 1:
            raise ConfigError(f"n_min: must be >= 1, got {self.n_min}")
        if self.alpha_points < 2:
            raise ConfigError(f"alpha_points: must be >= 2, got {self.alpha_points}")
        if not 0 < self.alpha_grid <= 0.1:
            raise ConfigError(f"alpha_grid: must lie in (0, 0.1], got {self.alpha_grid}")
        for key in self.params:
            if key not in PARAM_KEYS:
                raise ConfigError(f"{key}: unknown parameter")
        names = [a.name for a in self.sweep]
        if len(set(names)) != len(names):
            raise ConfigError("sweep: duplicate axis")

    def as_record(self) -> Dict[str, object]:
        """Plain mapping used in provenance blocks (round-trips through ``from_mapping``)."""
        rec: Dict[str, object] = {
            "experiment": self.experiment,
            "seed": int(self.seed),
            "mc_samples": int(self.mc_samples),
            "methods": ",".join(self.methods),
            "workers": int(self.workers),
            "n_min": int(self.n_min),
            "alpha_points": int(self.alpha_points),
            "alpha_grid": float(self.alpha_grid),
        }
        for key in sorted(self.params):
            rec[key] = self.params[key]
        for axis in self.sweep:
            rec[f"sweep.{axis.name}"] = axis.to_text()
        return rec


def _coerce_param(key: str, value) -> object:
    if key in _CHOICE_KEYS:
        text = str(value).strip().lower()
        if text not in _CHOICE_KEYS[key]:
            raise ConfigError(f"{key}: expected one of {', '.join(_CHOICE_KEYS[key])}, got {value!r}")
        return text
    try:
        number = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: not a number: {value!r}") from exc
    if key in _INT_KEYS:
        if number != int(number):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return int(number)
    return number


def from_mapping(entries: Iterable[Tuple[str, str]], base: Optional[ScenarioConfig] = None) -> ScenarioConfig:
    """Build a config from ``(key, text)`` pairs applied in order over ``base``."""
    cfg = base or ScenarioConfig(seed=default_seed())
    params = dict(cfg.params)
    sweeps = {a.name: a for a in cfg.sweep}
    scen: Dict[str, object] = {}
    for key, text in entries:
        key = key.strip()
        text = str(text).strip()
        if key.startswith("sweep."):
            name = key[len("sweep."):]
            if name in _DB_KEYS:
                raise ConfigError(f"{key}: use sweep.{_DB_KEYS[name]} = start:stop:num:dB for dB sweeps")
            sweeps[name] = parse_sweep(name, text)
        elif key in _DB_KEYS:
            try:
                params[_DB_KEYS[key]] = float(db_to_linear(float(text)))
            except ValueError as exc:
                raise ConfigError(f"{key}: not a number: {text!r}") from exc
        elif key in PARAM_KEYS:
            params[key] = _coerce_param(key, text)
        elif key in SCENARIO_KEYS:
            scen[key] = text
        else:
            raise ConfigError(f"{key}: unknown key")
    kwargs: Dict[str, object] = {}
    for key, text in scen.items():
        try:
            if key in ("experiment", "out"):
                kwargs[key] = str(text)
            elif key == "methods":
                kwargs[key] = tuple(m.strip() for m in str(text).split(",") if m.strip())
            elif key == "alpha_grid":
                kwargs[key] = float(text)
            elif key == "seed":
                kwargs[key] = int(str(text), 0)
            else:
                kwargs[key] = int(float(text))
        except ValueError as exc:
            raise ConfigError(f"{key}: bad value {text!r}") from exc
    return replace(cfg, params=params, sweep=tuple(sweeps.values()), **kwargs)


def parse_config_text(text: str, base: Optional[ScenarioConfig] = None,
                      source: str = "<config>") -> ScenarioConfig:
    """Parse the flat ``key = value`` grammar."""
    entries: List[Tuple[str, str]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split(" #", 1)[0].strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = stripped.split("=", 1)
        entries.append((key.strip(), value.strip()))
    try:
        return from_mapping(entries, base)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_config(path: str, base: Optional[ScenarioConfig] = None) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from exc
    return parse_config_text(text, base, source=path)


# Experiment defaults sit underneath user overrides.
EXPERIMENT_DEFAULTS: Dict[str, Dict[str, object]] = {
    "fig2": {"fading_b": "rician", "fading_e": "rician", "k_b": 5.0, "k_e": 5.0, "alpha": 0.7},
    "fig3": {"alpha": 0.3, "n": 300},
    "fig4": {"alpha": 0.7},
    "fig5": {"alpha": 0.7},
    "fig6": {},
    "fig7": {},
    "custom": {},
    "validate": {"k_b": 5.0, "k_e": 5.0},
    "adaptive": {},
    "nonadaptive": {},
}


def build_params(values: Mapping[str, object]) -> SystemParams:
    """Assemble :class:`SystemParams` from flat linear-unit values."""
    v = dict(values)
    try:
        scheme = BeamformingScheme.mrt() if v.get("scheme", "an") == "mrt" \
            else BeamformingScheme(float(v.get("alpha", 0.7)))

        def fading(kind, kf):
            return FadingModel.rician(float(v.get(kf, 5.0))) if v.get(kind, "rayleigh") == "rician" \
                else FadingModel.rayleigh()

        defaults = SystemParams()
        return SystemParams(
            k=int(v.get("k", defaults.k)),
            rho=float(v.get("rho", defaults.rho)),
            geometry_b=LinkGeometry(float(v.get("beta_b", 3.0)), float(v.get("distance_b", 1.0)),
                                    float(v.get("eta_b", 0.0))),
            geometry_e=LinkGeometry(float(v.get("beta_e", 1.0)), float(v.get("distance_e", 1.0)),
                                    float(v.get("eta_e", 0.0))),
            fading_b=fading("fading_b", "k_b"),
            fading_e=fading("fading_e", "k_e"),
            scheme=scheme,
            m=float(v.get("m", defaults.m)),
            n=int(v.get("n", defaults.n)),
            epsilon=float(v.get("epsilon", defaults.epsilon)),
            phi=float(v.get("phi", defaults.phi)),
            n_max=int(v.get("n_max", defaults.n_max)),
            slots=int(v.get("slots", defaults.slots)),
            main_gain=float(v.get("main_gain", defaults.main_gain)),
        )
    except ChannelError as exc:
        raise ConfigError(f"params: {exc}") from exc


def resolve_params(cfg: ScenarioConfig, point: Optional[Mapping[str, float]] = None) -> Dict[str, object]:
    """Experiment defaults, then user overrides, then the sweep point."""
    merged: Dict[str, object] = dict(EXPERIMENT_DEFAULTS.get(cfg.experiment, {}))
    merged.update(cfg.params)
    if point:
        for key, value in point.items():
            merged[key] = int(value) if key in _INT_KEYS else float(value)
    return merged

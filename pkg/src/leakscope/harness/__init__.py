"""Experiment runner, table I/O and command line."""

from __future__ import annotations

from .config import (
    ConfigError,
    ScenarioConfig,
    SweepAxis,
    build_params,
    default_seed,
    from_mapping,
    load_config,
    parse_config_text,
    parse_sweep,
)
from .io import emit, parse, parse_csv_text, to_csv_text
from .runner import ResultTable, TooFewSamplesError, config_from_provenance, ecdf_ks, run_scenario

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "SweepAxis",
    "build_params",
    "default_seed",
    "from_mapping",
    "load_config",
    "parse_config_text",
    "parse_sweep",
    "emit",
    "parse",
    "parse_csv_text",
    "to_csv_text",
    "ResultTable",
    "TooFewSamplesError",
    "config_from_provenance",
    "ecdf_ks",
    "run_scenario",
]

"""``leakscope`` command line."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from typing import List, Optional, Sequence

from .config import ConfigError, ScenarioConfig, default_seed, from_mapping, load_config
from .io import FORMATS, emit, to_csv_text
from .runner import run_scenario
from .selfcheck import run_selfcheck


def _split_set(items: Sequence[str], flag: str):
    pairs = []
    for item in items:
        if "=" not in item:
            raise ConfigError(f"{flag}: expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        pairs.append((key.strip(), value.strip()))
    return pairs


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value scenario file")
    p.add_argument("--seed", type=lambda s: int(s, 0), help="64-bit seed (default: $LEAKSCOPE_SEED or 2024)")
    p.add_argument("--out", help="output directory (created if missing); CSV goes to stdout when omitted")
    p.add_argument("--samples", type=int, help="Monte-Carlo samples per point")
    p.add_argument("--format", choices=FORMATS, default="csv", help="csv, or plot (SVG figure plus CSV)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="parameter override, repeatable (e.g. --set rho_db=10)")
    p.add_argument("--workers", type=int, help="worker processes for grid points")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leakscope",
        description="Average information leakage and secrecy-throughput design for "
                    "finite-blocklength wiretap links.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ail", help="leakage estimates at one point or over sweeps")
    _common(p)
    p.add_argument("--sweep", action="append", default=[], metavar="KEY=SPEC",
                   help="sweep axis, e.g. rho=-10:20:7:dB or n=100,200,400")
    p.add_argument("--methods", help="comma list from exact,saddle,closed,highsnr,mc")

    p = sub.add_parser("validate-dist", help="KS checks of the distribution laws against sampling")
    _common(p)
    p = sub.add_parser("design-adaptive", help="per-slot adaptive design over L sorted gains")
    _common(p)
    p = sub.add_parser("design-nonadaptive", help="global (N, alpha) of the non-adaptive design")
    _common(p)
    p = sub.add_parser("fig", help="reproduce one figure experiment")
    p.add_argument("number", type=int, choices=range(2, 8), metavar="{2..7}")
    _common(p)
    p = sub.add_parser("selfcheck", help="identity and oracle checks")
    p.add_argument("--seed", type=lambda s: int(s, 0))
    return parser


_EXPERIMENT = {"ail": "custom", "validate-dist": "validate", "design-adaptive": "adaptive",
               "design-nonadaptive": "nonadaptive"}


def config_from_args(args) -> ScenarioConfig:
    experiment = f"fig{args.number}" if args.command == "fig" else _EXPERIMENT[args.command]
    cfg = ScenarioConfig(experiment=experiment, seed=default_seed())
    if args.config:
        cfg = load_config(args.config, cfg)
        cfg = replace(cfg, experiment=experiment)
    pairs = _split_set(args.set, "--set")
    if getattr(args, "sweep", None):
        pairs += [(f"sweep.{k}", v) for k, v in _split_set(args.sweep, "--sweep")]
    if getattr(args, "methods", None):
        pairs.append(("methods", args.methods))
    if args.seed is not None:
        pairs.append(("seed", str(args.seed)))
    if args.samples is not None:
        pairs.append(("mc_samples", str(args.samples)))
    if args.workers is not None:
        pairs.append(("workers", str(args.workers)))
    if args.out is not None:
        pairs.append(("out", args.out))
    return from_mapping(pairs, cfg)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selfcheck":
        try:
            seed = args.seed if args.seed is not None else default_seed()
        except ConfigError as exc:
            print(f"leakscope: {exc}", file=sys.stderr)
            return 2
        results = run_selfcheck(seed)
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<22} {r.detail}  ({r.seconds:.1f} s)")
        return 0 if all(r.passed for r in results) else 1
    try:
        cfg = config_from_args(args)
        table = run_scenario(cfg)
    except ConfigError as exc:
        print(f"leakscope: {exc}", file=sys.stderr)
        return 2
    stem = f"fig{args.number}" if args.command == "fig" else args.command.replace("-", "_")
    if args.out is None and args.format == "csv":
        sys.stdout.write(to_csv_text(table).replace("\r\n", "\n"))
        return 0
    out_dir = args.out or "."
    try:
        os.makedirs(out_dir, exist_ok=True)
        for path in emit(table, args.format, out_dir, stem):
            print(path)
    except OSError as exc:
        print(f"leakscope: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

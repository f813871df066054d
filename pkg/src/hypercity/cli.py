"""Command-line entry point: ``hypercity <run> [--config FILE] [--out DIR] ...``.

Exit codes: 0 success, 2 validation error, 3 solver failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .params import ParameterError, SolverError
from .scenario import (RUN_KINDS, ConfigError, ScenarioConfig, load_config, parse_list,
                       parse_range, run, write_outputs)

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER = 0, 2, 3

log = logging.getLogger("hypercity")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypercity",
        description="Bathtub congestion, perimeter control and land-use equilibrium runs",
    )
    parser.add_argument("run", choices=RUN_KINDS)
    parser.add_argument("--config", help="key = value scenario file")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--grid", type=int, help="time/space grid points")
    parser.add_argument("--eta", help="eta sweep a:b:steps")
    parser.add_argument("--xi", help="xi sweep a:b:steps")
    parser.add_argument("--epsilon", help="comma-separated bias factors")
    parser.add_argument("--mode", choices=("UE", "perimeter"))
    parser.add_argument("--jobs", type=int, help="worker processes for sensitivity grids")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    changes: dict = {"run": args.run}
    if args.out is not None:
        changes["out"] = args.out
    if args.format is not None:
        changes["format"] = args.format
    if args.grid is not None:
        changes["grid"] = args.grid
    if args.eta is not None:
        changes["eta_grid"] = parse_range(args.eta)
    if args.xi is not None:
        changes["xi_grid"] = parse_range(args.xi)
    if args.epsilon is not None:
        eps = parse_list(args.epsilon)
        changes["epsilons"] = eps
        if len(eps) == 1:
            changes["epsilon"] = eps[0]
    if args.mode is not None:
        changes["mode"] = args.mode
    if args.jobs is not None:
        changes["jobs"] = args.jobs
    return dataclasses.replace(cfg, **changes)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
    except (ConfigError, ParameterError, OSError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        tables = run(cfg)
    except ParameterError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    for path in write_outputs(tables, cfg.out, cfg.format):
        log.info("wrote %s", path)
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

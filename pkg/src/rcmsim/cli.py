"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 numerical failure during a
solver run, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    CutLocusError,
    GenerationError,
    NoConvergenceError,
    NumericalError,
    SolverError,
    VerificationError,
)
from .geometry import Euclidean, SO3
from .harness import ScenarioConfig, euclidean_verify, parse_config, scenario1, scenario2
from .rcm import karcher_mean

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VERIFICATION = 3


def _load_config(args) -> ScenarioConfig:
    cfg = parse_config(args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _cmd_scenario1(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out) / "scenario1.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    scenario1(cfg, out)
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_scenario2(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out) / "scenario2.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    scenario2(cfg, out)
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_euclidean_verify(args) -> int:
    cfg = _load_config(args)
    if cfg.group == "so3" and args.config is None:
        cfg = replace(cfg, group="euclidean:3")
    out = Path(args.out) / "euclidean_verify.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    euclidean_verify(cfg, out, sweep_size=args.graphs, negative_test=args.negative_test)
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_karcher(args) -> int:
    with open(args.points, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    points = np.asarray(data, dtype=float)
    if points.ndim == 3 and points.shape[1:] == (3, 3):
        group = SO3()
    elif points.ndim == 2:
        group = Euclidean(points.shape[1])
    else:
        raise ConfigError(
            "points file must hold a list of 3x3 matrices or a list of n-vectors"
        )
    mean = karcher_mean(group, points)
    json.dump(mean.tolist(), sys.stdout)
    print()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcm-sim",
        description="Distributed Riemannian center-of-mass consensus simulations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML or JSON scenario config")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, help="override the config seed")

    p1 = sub.add_parser("scenario1", help="four-solver comparison on one instance")
    common(p1)
    p1.set_defaults(fn=_cmd_scenario1)

    p2 = sub.add_parser("scenario2", help="rcm-error quartiles over many instances")
    common(p2)
    p2.set_defaults(fn=_cmd_scenario2)

    p3 = sub.add_parser("euclidean-verify", help="spectral and limit verification sweep")
    common(p3)
    p3.add_argument("--graphs", type=int, default=100, help="sweep size")
    p3.add_argument(
        "--negative-test",
        action="store_true",
        help="also inject a disconnected graph that must be reported as failing",
    )
    p3.set_defaults(fn=_cmd_euclidean_verify)

    p4 = sub.add_parser("karcher", help="centralized Karcher mean of a point file")
    p4.add_argument("--points", required=True, help="JSON file with the points")
    p4.set_defaults(fn=_cmd_karcher)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, CutLocusError, NumericalError, NoConvergenceError, GenerationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

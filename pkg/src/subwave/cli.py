"""``subwave`` command-line driver.

Exit codes: 0 all requested checks pass, 1 a check failed, 2 bad config,
3 numerical failure (the failing stage is named on stderr).
"""
import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .errors import (CapExceeded, NumericalFailure, ParameterDomainError,
                     UnsupportedRepresentation)
from .experiment import PIPELINES, ConfigError, load_config

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="subwave",
        description="Subordinated traveling waves: densities, waves, fronts and checks.")
    parser.add_argument("--version", action="version", version=f"subwave {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "density": "tabulate the inverse-subordinator density G_t(tau)",
        "subordinate": "tabulate the subordinated wave psi^E(x, t)",
        "front": "trace the level-beta front x_beta(t)",
        "verify": "fit and bound the front against the class laws",
        "mc-check": "Monte Carlo cross-validation of subordinate",
        "gfd-check": "Caputo and distributed-order operator checks",
    }
    for name in PIPELINES:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", type=Path, help="experiment config (JSON)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--seed", type=int, help="RNG seed (overrides the config)")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="worker threads (default: machine parallelism)")
        p.add_argument("--samples", type=int, help="Monte Carlo samples per point")
        p.add_argument("--step", type=float, help="Monte Carlo path step")
        p.add_argument("--alpha", type=float, help="use Stable(alpha) as the subordinator")
        p.add_argument("--t", type=float, nargs="+", help="explicit time values")
        p.add_argument("--tau-max", type=float, help="upper end of the tau grid")
    return parser


def _overrides(args):
    o = {}
    if args.alpha is not None:
        o["spec"] = {"variant": "stable", "alpha": args.alpha}
    if args.t is not None:
        o["t_grid"] = {"values": sorted(args.t)}
    if args.tau_max is not None:
        o["tau_grid"] = {"tau_max": args.tau_max}
    if args.seed is not None:
        o["seed"] = args.seed
    mc = {}
    if args.samples is not None:
        mc["samples"] = args.samples
    if args.step is not None:
        mc["step"] = args.step
    if mc:
        o["mc"] = mc
    return o


def run(argv=None):
    """Run one subcommand; returns the exit code."""
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text() if args.config is not None else None
        cfg = load_config(text, _overrides(args))
        artifacts, passed = PIPELINES[args.command](cfg, threads=max(1, args.threads))
    except OSError as exc:
        print(f"subwave: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, ParameterDomainError, UnsupportedRepresentation) as exc:
        print(f"subwave: bad config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, CapExceeded) as exc:
        stage = getattr(exc, "stage", None) or args.command
        print(f"subwave: numerical failure in stage {stage!r}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    args.out.mkdir(parents=True, exist_ok=True)
    for name, body in artifacts.items():
        path = args.out / name
        with open(path, "w", newline="\n") as fh:
            fh.write(body)
        print(path)
    print(f"{args.command}: {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_FAILED


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command line entry point: ``goldstein run|plot|selftest``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .harness import ExperimentConfig, run_experiment
from .plotting import plot_convergence
from .selftest import run_selftest
from .trace import read_csv


def _cmd_run(args):
    cfg = ExperimentConfig.from_json(args.config)
    if args.output_dir:
        cfg.output_dir = args.output_dir
    summary = run_experiment(cfg)
    for run in summary["runs"]:
        if "error" in run:
            print(f"{run['tag']}: error {run['error']}")
        else:
            print(f"{run['tag']}: steps={run['accepted_steps']} calls={run['total_calls']} "
                  f"evals={run['total_subgrad_evals']} gap={run['final_gap']:.3e} "
                  f"dist={run['final_dist']:.3e} ({run['stop_reason']})")
    print(f"wrote {Path(cfg.output_dir) / 'summary.json'}")
    return 0


def _cmd_plot(args):
    traces = [read_csv(p) for p in args.trace]
    labels = args.label or [Path(p).stem for p in args.trace]
    if len(labels) != len(traces):
        raise ValueError("need one label per trace")
    plot_convergence(traces, labels, y=args.y, x=args.x, out=args.out, title=args.title)
    print(f"wrote {args.out}")
    return 0


def _cmd_selftest(args):
    return 0 if run_selftest() else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="goldstein", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir", default=None, help="override output_dir from the config")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("plot", help="plot one or more CSV traces")
    p.add_argument("--trace", nargs="+", required=True)
    p.add_argument("--label", nargs="+")
    p.add_argument("--y", choices=("dist", "gap"), default="dist")
    p.add_argument("--x", choices=("calls", "evals"), default="calls")
    p.add_argument("--out", required=True)
    p.add_argument("--title")
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("selftest", help="oracle agreement and invariant checks")
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except Exception as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

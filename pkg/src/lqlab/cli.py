"""Command-line interface for the experiment harness.

Subcommands: run, reproduce, pretrain, check. Relative --out paths are rooted
at $LQLAB_OUT when set.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import labrun


def _load_json(path: str) -> dict:
    p = Path(path)
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise SystemExit(f"cannot read {p}: {exc}")
    except json.JSONDecodeError as exc:
        raise SystemExit(f"{p} is not valid JSON: {exc}")
    if not isinstance(obj, dict):
        raise SystemExit(f"{p} must contain a JSON object")
    return obj


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="override the base seed")
    common.add_argument("--trials", type=int, default=None,
                        help="override the number of Monte-Carlo trials")
    common.add_argument("--quiet", action="store_true",
                        help="suppress progress output")

    parser = argparse.ArgumentParser(
        prog="lqlab",
        description="Adaptive-LQR simulation laboratory: run scenarios, "
                    "reproduce figure bundles, pretrain bases, check bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", parents=[common],
                           help="run one scenario file")
    p_run.add_argument("scenario", help="path to a scenario JSON file")
    p_run.add_argument("--out", default=None, help="output directory")

    p_rep = sub.add_parser("reproduce", parents=[common],
                           help="run a figure bundle")
    p_rep.add_argument("figure", choices=labrun.FIGURES)
    p_rep.add_argument("--out", default=None, help="output directory")

    p_pre = sub.add_parser("pretrain", parents=[common],
                           help="learn a basis from offline multi-task data")
    p_pre.add_argument("dataset_config", help="path to a dataset config JSON file")
    p_pre.add_argument("--out", default=None, help="output directory")

    p_chk = sub.add_parser("check", parents=[common],
                           help="report the theory constants for a configuration")
    p_chk.add_argument("system_config", help="path to a check config JSON file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            raw = _load_json(args.scenario)
            rs = labrun.resolve_scenario(raw)
            out_dir = labrun.resolve_out_dir(args.out, rs.name)
            result = labrun.run_scenario(
                rs, trials=args.trials, seed=args.seed, quiet=args.quiet
            )
            paths = labrun.write_bundle(
                out_dir, [result],
                {"command": "run", "package": "lqlab 0.1.0",
                 "source": str(args.scenario)},
            )
            if not args.quiet:
                for p in paths:
                    print(p)
        elif args.command == "reproduce":
            out_dir = labrun.resolve_out_dir(args.out, args.figure)
            paths = labrun.reproduce(
                args.figure, out_dir, trials=args.trials, seed=args.seed,
                quiet=args.quiet,
            )
            if not args.quiet:
                for p in paths:
                    print(p)
        elif args.command == "pretrain":
            config = _load_json(args.dataset_config)
            out_dir = labrun.resolve_out_dir(args.out, "pretrain")
            path = labrun.run_pretrain_job(
                config, out_dir, seed=args.seed, quiet=args.quiet
            )
            if not args.quiet:
                print(path)
        elif args.command == "check":
            config = _load_json(args.system_config)
            _, lines = labrun.check_report(config)
            for line in lines:
                print(line)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Reproduce every benchmark figure bundle and, when plotkit is installed,
render each one to a PNG.

Usage:
    python scripts/reproduce_all.py --out results [--trials N] [--loglog]

With default trials (20) the full set takes a few minutes; --trials 3 gives a
quick smoke pass with the same file layout.
"""

from __future__ import annotations

import argparse
import importlib.util
import subprocess
import sys
from pathlib import Path

from lqlab import labrun


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results"),
                        help="directory to hold one bundle per figure (default: results)")
    parser.add_argument("--trials", type=int, default=None,
                        help="override the per-scenario trial count")
    parser.add_argument("--loglog", action="store_true",
                        help="render log-log images with slope guides instead of linear-t")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    have_plotkit = importlib.util.find_spec("plotkit") is not None
    if not have_plotkit:
        print("plotkit is not installed; writing bundles only", file=sys.stderr)
    for figure in labrun.FIGURES:
        bundle_dir = args.out / figure
        print(f"== {figure} -> {bundle_dir}")
        labrun.reproduce(figure, bundle_dir, trials=args.trials, quiet=False)
        if have_plotkit:
            image = args.out / f"{figure}.png"
            cmd = [sys.executable, "-m", "plotkit.cli",
                   "--bundle", str(bundle_dir), "--out", str(image)]
            if args.loglog:
                cmd.append("--loglog")
            subprocess.run(cmd, check=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

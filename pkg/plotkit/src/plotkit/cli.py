"""Command line: render one bundle directory to one image file."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bundle import bundle_files
from .figure import PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render seed-mean regret curves (with inter-quartile bands) "
        "from an experiment bundle.",
    )
    parser.add_argument("--bundle", required=True, type=Path,
                        help="bundle directory containing scenario CSVs")
    parser.add_argument("--out", required=True, type=Path,
                        help="image file to write (format from the extension)")
    parser.add_argument("--loglog", action="store_true",
                        help="log-scale both axes and add slope-1/2 and slope-1 "
                        "reference lines")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = PlotSpec(
            inputs=bundle_files(args.bundle),
            out_path=args.out,
            scale="loglog" if args.loglog else "linear",
        )
        out = render(spec)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

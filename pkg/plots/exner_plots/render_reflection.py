"""Render a log-scale reflection-error chart from a reflection_report.csv.

Example:
    python -m exner_plots.render_reflection --report out/reflection_report.csv \
        --out reflection.png
"""

from __future__ import annotations

import argparse
import sys

from .figures import PlotInputError, render_reflection_report


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--report", required=True,
                        help="reflection_report.csv from the compare command")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        path = render_reflection_report(args.report, args.out)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

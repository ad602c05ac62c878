"""Render stacked-panel figures from solver snapshot CSVs.

Example:
    python -m exner_plots.render_snapshots \
        --snapshots out/nc/snapshot_t8.csv out/ac/snapshot_t8.csv \
        --labels nc ac --panels h,u,zb --x-interface 4 --out fig_t8.png
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FigureSpec, PlotInputError, render_snapshot_figure


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--snapshots", nargs="+", required=True,
                        help="snapshot CSV files to overlay")
    parser.add_argument("--labels", nargs="+",
                        help="legend labels (default: parent directory names)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--panels", default="h,u,zb",
                        help="comma-separated subset of h,u,zb")
    parser.add_argument("--x-range", dest="x_range",
                        help="plot window as 'lo,hi' (default: full domain)")
    parser.add_argument("--x-interface", dest="x_interface", type=float,
                        help="draw a vertical marker at this position")
    args = parser.parse_args(argv)

    labels = args.labels or [Path(p).parent.name or Path(p).stem
                             for p in args.snapshots]
    x_range = None
    if args.x_range:
        lo, _, hi = args.x_range.partition(",")
        x_range = (float(lo), float(hi))
    try:
        spec = FigureSpec(
            snapshots=tuple(args.snapshots),
            labels=tuple(labels),
            out_path=args.out,
            panels=tuple(p for p in args.panels.split(",") if p),
            x_range=x_range,
            x_interface=args.x_interface,
        )
        path = render_snapshot_figure(spec)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Figure builders for solver snapshot CSVs and reflection reports.

Read-only consumers of the simulator's file formats: snapshot files carry
the header x,eta,q,zb,h,u with one row per cell, reflection reports the
header strategy,t,linf_h,l2_h.  No computation happens here beyond
plotting.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SNAPSHOT_HEADER = ["x", "eta", "q", "zb", "h", "u"]
REPORT_HEADER = ["strategy", "t", "linf_h", "l2_h"]
PANEL_LABELS = {"h": "water depth h [m]", "u": "velocity u [m/s]",
                "zb": "sediment layer z_b [m]"}

# floor used to keep zero metrics visible on the log axis
LOG_FLOOR = 1e-16


class PlotInputError(ValueError):
    """Missing or malformed input file."""


@dataclass(frozen=True)
class FigureSpec:
    """One stacked-panel figure comparing snapshot files."""

    snapshots: tuple[str, ...]
    labels: tuple[str, ...]
    out_path: str
    panels: tuple[str, ...] = ("h", "u", "zb")
    x_range: tuple[float, float] | None = None
    x_interface: float | None = None

    def __post_init__(self):
        if not self.panels:
            raise PlotInputError("panel list is empty, nothing to draw")
        unknown = [p for p in self.panels if p not in PANEL_LABELS]
        if unknown:
            raise PlotInputError(f"unknown panels {unknown}; allowed: h, u, zb")
        if len(self.labels) != len(self.snapshots):
            raise PlotInputError(
                f"{len(self.snapshots)} snapshots but {len(self.labels)} labels"
            )


def load_snapshot(path: str | Path) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise PlotInputError(f"snapshot file not found: {path}")
    with path.open() as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != SNAPSHOT_HEADER:
            raise PlotInputError(
                f"{path}: expected header {','.join(SNAPSHOT_HEADER)}, "
                f"got {header}"
            )
        data = np.array([[float(v) for v in row] for row in reader])
    if data.size == 0:
        raise PlotInputError(f"{path}: no data rows")
    return {name: data[:, i] for i, name in enumerate(SNAPSHOT_HEADER)}


def load_reflection_report(path: str | Path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise PlotInputError(f"reflection report not found: {path}")
    with path.open() as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != REPORT_HEADER:
            raise PlotInputError(
                f"{path}: expected header {','.join(REPORT_HEADER)}, "
                f"got {reader.fieldnames}"
            )
        rows = [
            {
                "strategy": row["strategy"],
                "t": float(row["t"]),
                "linf_h": float(row["linf_h"]),
                "l2_h": float(row["l2_h"]),
            }
            for row in reader
        ]
    if not rows:
        raise PlotInputError(f"{path}: no data rows")
    return rows


def render_snapshot_figure(spec: FigureSpec) -> Path:
    """Stacked per-field panels with one curve per snapshot file."""
    curves = [load_snapshot(p) for p in spec.snapshots]
    x0 = curves[0]["x"]
    sel0 = _range_mask(x0, spec.x_range)
    for path, data in zip(spec.snapshots, curves):
        sel = _range_mask(data["x"], spec.x_range)
        if sel.sum() != sel0.sum() or not np.allclose(
            data["x"][sel], x0[sel0], rtol=0, atol=1e-12
        ):
            raise PlotInputError(
                f"{path}: x column differs from {spec.snapshots[0]} over "
                f"the plotted range"
            )

    fig, axes = plt.subplots(
        len(spec.panels), 1, sharex=True,
        figsize=(8.0, 2.2 * len(spec.panels)), constrained_layout=True,
    )
    axes = np.atleast_1d(axes)
    for ax, panel in zip(axes, spec.panels):
        for label, data in zip(spec.labels, curves):
            sel = _range_mask(data["x"], spec.x_range)
            ax.plot(data["x"][sel], data[panel][sel], linewidth=1.2, label=label)
        if spec.x_interface is not None:
            ax.axvline(spec.x_interface, color="0.4", linestyle="--",
                       linewidth=0.9)
        ax.set_ylabel(PANEL_LABELS[panel])
        ax.grid(alpha=0.3)
    axes[0].legend(loc="upper right", fontsize=9)
    axes[-1].set_xlabel("x [m]")
    return _save(fig, spec.out_path)


def render_reflection_report(report_csv: str | Path, out_path: str | Path) -> Path:
    """Log-scale chart of the Linf depth error per strategy and probe time."""
    rows = load_reflection_report(report_csv)
    strategies = sorted({r["strategy"] for r in rows})
    times = sorted({r["t"] for r in rows})
    fig, ax = plt.subplots(figsize=(7.0, 4.0), constrained_layout=True)
    width = 0.8 / len(strategies)
    for i, strategy in enumerate(strategies):
        values = [
            max(
                next(r["linf_h"] for r in rows
                     if r["strategy"] == strategy and r["t"] == t),
                LOG_FLOOR,
            )
            for t in times
        ]
        ax.bar(
            np.arange(len(times)) + (i - (len(strategies) - 1) / 2) * width,
            values, width=width, label=strategy,
        )
    ax.set_yscale("log")
    ax.set_xticks(np.arange(len(times)))
    ax.set_xticklabels([f"t = {t:g}" for t in times])
    ax.set_ylabel("Linf(h) error vs reference [m]")
    ax.grid(alpha=0.3, axis="y")
    ax.legend()
    return _save(fig, out_path)


def _range_mask(x: np.ndarray, x_range: tuple[float, float] | None) -> np.ndarray:
    if x_range is None:
        return np.ones_like(x, dtype=bool)
    return (x >= x_range[0]) & (x <= x_range[1])


def _save(fig, out_path: str | Path) -> Path:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path

"""Figure scripts for the 1D Exner wave-train simulator's CSV outputs."""

from .figures import (
    FigureSpec,
    PlotInputError,
    load_reflection_report,
    load_snapshot,
    render_reflection_report,
    render_snapshot_figure,
)

__all__ = [
    "FigureSpec",
    "PlotInputError",
    "load_reflection_report",
    "load_snapshot",
    "render_reflection_report",
    "render_snapshot_figure",
]

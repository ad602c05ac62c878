"""Config parsing, file output, and the run / compare / convergence commands.

Configs are flat key=value text ('#' comments allowed); unknown keys are
rejected so typos cannot silently fall back to defaults.  Snapshots and
diagnostics are CSV with 17 significant digits, enough to round-trip
float64 exactly.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .boundary import WaveTrainForcing
from .driver import (
    ReflectionMetric,
    RunConfig,
    RunResult,
    extended_reference_config,
    make_grid,
    reflection_metric,
    run,
)
from .errors import ConfigError, ExnerError
from .model import PhysicalParams
from .spatial import Grid
from .stepper import State

_SCALAR_KEYS = {
    "cfl": float,
    "fixed_dt": float,
    "x_left": float,
    "x_interface": float,
    "x_right": float,
    "n_cells": int,
    "g": float,
    "a_g": float,
    "m": float,
    "rho0": float,
    "u0": float,
    "h0": float,
    "zb0": float,
    "forcing_amplitude": float,
    "forcing_omega": float,
    "sigma": float,
    "t_final": float,
}
_STRING_KEYS = ("scheme", "bc", "out_dir")
_ALL_KEYS = set(_SCALAR_KEYS) | set(_STRING_KEYS) | {"snapshot_times"}


def parse_config(text: str) -> RunConfig:
    """Parse key=value lines into a validated RunConfig."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, rhs = line.partition("=")
        key = key.strip()
        rhs = rhs.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key == "snapshot_times":
                values[key] = tuple(
                    float(tok) for tok in rhs.split(",") if tok.strip()
                )
            elif key in _STRING_KEYS:
                values[key] = rhs
            else:
                values[key] = _SCALAR_KEYS[key](rhs)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc

    try:
        params = PhysicalParams(
            g=values.pop("g", 9.81),
            a_g=values.pop("a_g", 0.1),
            m=values.pop("m", 3.0),
            rho0=values.pop("rho0", 0.2),
        )
        forcing = WaveTrainForcing(
            u_mean=values.pop("u0", 0.2),
            amplitude=values.pop("forcing_amplitude", 0.01),
            omega=values.pop("forcing_omega", 14.0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cfg = RunConfig(params=params, forcing=forcing, u0=forcing.u_mean, **values)
    return cfg.validate()


def serialize_config(cfg: RunConfig) -> str:
    """Inverse of parse_config; parse(serialize(cfg)) == cfg."""
    lines = [
        f"scheme={cfg.scheme}",
        f"cfl={cfg.cfl!r}",
        f"x_left={cfg.x_left!r}",
        f"x_interface={cfg.x_interface!r}",
        f"x_right={cfg.x_right!r}",
        f"n_cells={cfg.n_cells}",
        f"g={cfg.params.g!r}",
        f"a_g={cfg.params.a_g!r}",
        f"m={cfg.params.m!r}",
        f"rho0={cfg.params.rho0!r}",
        f"u0={cfg.u0!r}",
        f"h0={cfg.h0!r}",
        f"zb0={cfg.zb0!r}",
        f"forcing_amplitude={cfg.forcing.amplitude!r}",
        f"forcing_omega={cfg.forcing.omega!r}",
        f"bc={cfg.bc}",
        f"sigma={cfg.sigma!r}",
        f"t_final={cfg.t_final!r}",
        "snapshot_times=" + ",".join(repr(t) for t in cfg.snapshot_times),
        f"out_dir={cfg.out_dir}",
    ]
    if cfg.fixed_dt is not None:
        lines.insert(2, f"fixed_dt={cfg.fixed_dt!r}")
    return "\n".join(lines) + "\n"


def load_config(path: str | Path) -> RunConfig:
    return parse_config(Path(path).read_text())


def snapshot_filename(t: float) -> str:
    return f"snapshot_t{t:g}.csv"


def write_snapshot(state: State, t: float, grid: Grid, out_dir: str | Path) -> Path:
    """One CSV row per owned cell: x,eta,q,zb,h,u at full float64 precision."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / snapshot_filename(t)
    x = grid.centers()
    sl = slice(1, -1)
    h = state.h()[sl]
    u = state.q[sl] / h
    columns = (x, state.eta[sl], state.q[sl], state.zb[sl], h, u)
    try:
        with path.open("w", newline="") as f:
            f.write("x,eta,q,zb,h,u\n")
            for row in zip(*columns):
                f.write(",".join(f"{v:.17g}" for v in row) + "\n")
    except OSError as exc:
        raise ExnerError(f"cannot write snapshot {path}: {exc}") from exc
    return path


def read_snapshot(path: str | Path) -> dict[str, np.ndarray]:
    """Read a snapshot CSV back into column arrays."""
    path = Path(path)
    with path.open() as f:
        reader = csv.reader(f)
        header = next(reader)
        if header != ["x", "eta", "q", "zb", "h", "u"]:
            raise ExnerError(f"{path}: unexpected snapshot header {header}")
        rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows)
    return {name: data[:, i] for i, name in enumerate(header)}


def write_diagnostics(result: RunResult, out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "diagnostics.csv"
    with path.open("w", newline="") as f:
        f.write("t,dt,mcfl,lambda_max,total_eta,total_zb,max_abs_u,min_h\n")
        for d in result.diagnostics:
            f.write(
                ",".join(
                    f"{getattr(d, name):.17g}"
                    for name in (
                        "t", "dt", "mcfl", "lambda_max",
                        "total_eta", "total_zb", "max_abs_u", "min_h",
                    )
                )
                + "\n"
            )
    return path


def run_and_write(cfg: RunConfig) -> RunResult:
    """Run one simulation and write its snapshots plus diagnostics."""
    result = run(cfg)
    for t, snap in result.snapshots:
        write_snapshot(snap, t, result.grid, cfg.out_dir)
    write_diagnostics(result, cfg.out_dir)
    return result


def compare_mode(cfg: RunConfig) -> list[dict]:
    """Run nc, sc and ac plus the extended-domain reference from one config.

    Emits per-strategy snapshot directories and a reflection_report.csv
    with the depth-error norms over the physical region at every snapshot
    time, measured against the reference run.
    """
    base = Path(cfg.out_dir)
    ref_cfg = dataclasses.replace(
        extended_reference_config(cfg), out_dir=str(base / "reference")
    )
    reference = run_and_write(ref_cfg)

    region = (cfg.x_left, cfg.x_interface)
    rows = []
    for bc in ("nc", "sc", "ac"):
        sub = dataclasses.replace(cfg, bc=bc, out_dir=str(base / bc))
        result = run_and_write(sub)
        for t, _ in result.snapshots:
            if t == 0.0:
                continue
            metric = reflection_metric(result, reference, region, t)
            rows.append(
                {"strategy": bc, "t": t, "linf_h": metric.linf, "l2_h": metric.l2}
            )

    base.mkdir(parents=True, exist_ok=True)
    with (base / "reflection_report.csv").open("w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=["strategy", "t", "linf_h", "l2_h"])
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {
                    "strategy": row["strategy"],
                    "t": f"{row['t']:g}",
                    "linf_h": f"{row['linf_h']:.17g}",
                    "l2_h": f"{row['l2_h']:.17g}",
                }
            )
    return rows


def convergence_study(
    cfg: RunConfig, resolutions: list[int]
) -> list[dict]:
    """Self-convergence of the depth field between successive refinements.

    resolutions are active-region cell counts (each double the previous);
    runs use the nc boundary on the physical region only.  Returns one row
    per refinement pair with the L1 difference and observed order.
    """
    full_span = cfg.x_right - cfg.x_left
    active_span = cfg.x_interface - cfg.x_left
    solutions: dict[int, np.ndarray] = {}
    for n_active in resolutions:
        n_full = round(n_active * full_span / active_span)
        sub = dataclasses.replace(
            cfg, bc="nc", n_cells=n_full,
            snapshot_times=(cfg.t_final,),
        )
        result = run(sub)
        solutions[n_active] = result.snapshots[-1][1].h()[1:-1]

    rows = []
    prev_err = None
    for n_coarse, n_fine in zip(resolutions, resolutions[1:]):
        if n_fine != 2 * n_coarse:
            raise ConfigError("resolutions must double between levels")
        fine = solutions[n_fine]
        restricted = 0.5 * (fine[0::2] + fine[1::2])
        dx = active_span / n_coarse
        err = dx * float(np.sum(np.abs(solutions[n_coarse] - restricted)))
        order = None if prev_err is None else float(np.log2(prev_err / err))
        rows.append(
            {"n_coarse": n_coarse, "n_fine": n_fine, "l1_h": err, "order": order}
        )
        prev_err = err
    return rows


def _apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates = {}
    if getattr(args, "bc", None):
        updates["bc"] = args.bc
    if getattr(args, "t_final", None) is not None:
        updates["t_final"] = args.t_final
        updates["snapshot_times"] = tuple(
            t for t in cfg.snapshot_times if t <= args.t_final
        )
    if getattr(args, "out", None):
        updates["out_dir"] = args.out
    if updates:
        cfg = dataclasses.replace(cfg, **updates).validate()
    return cfg


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exner1d",
        description="1D shallow water + Exner wave-train simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single simulation")
    p_run.add_argument("--config", help="key=value config file")
    p_run.add_argument("--bc", choices=["nc", "sc", "ac"])
    p_run.add_argument("--t-final", dest="t_final", type=float)
    p_run.add_argument("--out")

    p_cmp = sub.add_parser("compare", help="nc/sc/ac + reference comparison")
    p_cmp.add_argument("--config", help="key=value config file")
    p_cmp.add_argument("--out")

    p_conv = sub.add_parser("convergence", help="self-convergence study")
    p_conv.add_argument("--config", help="key=value config file")
    p_conv.add_argument("--levels", type=int, default=3)
    p_conv.add_argument("--base-n", dest="base_n", type=int)
    p_conv.add_argument("--out")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig().validate()
        cfg = _apply_overrides(cfg, args)

        if args.command == "run":
            result = run_and_write(cfg)
            last = result.diagnostics[-1]
            print(
                f"run bc={cfg.bc} finished: {len(result.diagnostics)} steps to "
                f"t={last.t:g}, max MCFL "
                f"{max(d.mcfl for d in result.diagnostics):.4f}, outputs in "
                f"{cfg.out_dir}"
            )
        elif args.command == "compare":
            rows = compare_mode(cfg)
            print(f"strategy  t        linf_h        l2_h")
            for row in rows:
                print(
                    f"{row['strategy']:<8}  {row['t']:<7g}  "
                    f"{row['linf_h']:.6e}  {row['l2_h']:.6e}"
                )
            print(f"report written to {Path(cfg.out_dir) / 'reflection_report.csv'}")
        else:  # convergence
            active = make_grid(dataclasses.replace(cfg, bc="nc")).n_cells
            base_n = args.base_n or active
            resolutions = [base_n * 2**j for j in range(args.levels)]
            rows = convergence_study(cfg, resolutions)
            out = Path(cfg.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            with (out / "convergence.csv").open("w", newline="") as f:
                writer = csv.DictWriter(
                    f, fieldnames=["n_coarse", "n_fine", "l1_h", "order"]
                )
                writer.writeheader()
                writer.writerows(rows)
            for row in rows:
                order = "-" if row["order"] is None else f"{row['order']:.3f}"
                print(
                    f"N {row['n_coarse']:>5} -> {row['n_fine']:>5}: "
                    f"L1(h) {row['l1_h']:.6e}  order {order}"
                )
        return 0
    except ExnerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

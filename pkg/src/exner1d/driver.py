"""Simulation orchestration: adaptive dt, stability monitors, snapshots.

A run advances the wave-train scenario from a uniform initial state,
recomputing dt each step from the asymptotic wave speeds (dt = CFL dx /
lambda_max), logging per-step diagnostics, and clamping steps so snapshot
times and t_final are hit exactly.  The reflection harness compares a run
against an extended-domain reference that no wave can return from.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .boundary import BoundaryStrategy, WaveTrainForcing
from .errors import ConfigError, SimulationAbort
from .model import PhysicalParams, approx_eigenvalues
from .spatial import Grid
from .stepper import State, first_order_step, second_order_step

SCHEMES = ("first", "second")

# Relative sliver below which a CFL step is stretched onto the next event.
_EVENT_RTOL = 1e-12


@dataclass(frozen=True)
class RunConfig:
    """Full description of one simulation; defaults are the wave-train study.

    n_cells counts cells over the configured domain [x_left, x_right]; runs
    without an absorbing layer keep the same dx and truncate at x_interface.
    """

    scheme: str = "second"
    cfl: float = 7.7
    fixed_dt: float | None = None
    x_left: float = -2.0
    x_interface: float = 4.0
    x_right: float = 10.0
    n_cells: int = 1200
    params: PhysicalParams = field(default_factory=PhysicalParams)
    forcing: WaveTrainForcing = field(default_factory=WaveTrainForcing)
    bc: str = "nc"
    sigma: float = 3.0
    h0: float = 1.0
    u0: float = 0.2
    zb0: float = 0.1
    t_final: float = 8.0
    snapshot_times: tuple[float, ...] = (1.0, 4.0, 8.0)
    out_dir: str = "out"

    def validate(self) -> "RunConfig":
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.bc not in ("nc", "sc", "ac"):
            raise ConfigError(f"bc must be nc, sc or ac, got {self.bc!r}")
        if self.cfl <= 0:
            raise ConfigError(f"cfl must be positive, got {self.cfl}")
        if self.fixed_dt is not None and self.fixed_dt <= 0:
            raise ConfigError(f"fixed_dt must be positive, got {self.fixed_dt}")
        if self.t_final <= 0:
            raise ConfigError(f"t_final must be positive, got {self.t_final}")
        if self.h0 <= 0:
            raise ConfigError(f"h0 must be positive, got {self.h0}")
        if self.zb0 < 0:
            raise ConfigError(f"zb0 must be non-negative, got {self.zb0}")
        if self.bc == "ac" and self.sigma <= 0:
            raise ConfigError(f"sigma must be positive for bc=ac, got {self.sigma}")
        for t in self.snapshot_times:
            if not 0.0 <= t <= self.t_final:
                raise ConfigError(
                    f"snapshot time {t} outside [0, t_final={self.t_final}]"
                )
        make_grid(self)  # geometry invariants (ordering, cell alignment)
        return self


@dataclass(frozen=True)
class StepDiagnostics:
    t: float
    dt: float
    mcfl: float
    lambda_max: float
    total_eta: float
    total_zb: float
    max_abs_u: float
    min_h: float

    FIELDS = ("t", "dt", "mcfl", "lambda_max", "total_eta", "total_zb",
              "max_abs_u", "min_h")


@dataclass
class RunResult:
    grid: Grid
    snapshots: list[tuple[float, State]]
    diagnostics: list[StepDiagnostics]
    initial: State
    strategy: BoundaryStrategy
    eta_outflow: float
    zb_outflow: float


class ReflectionMetric(NamedTuple):
    linf: float
    l2: float


def make_grid(cfg: RunConfig) -> Grid:
    """Grid for the configured run; dx is shared across boundary choices."""
    dx = (cfg.x_right - cfg.x_left) / cfg.n_cells
    if cfg.bc == "ac":
        return Grid(cfg.x_left, cfg.x_interface, cfg.x_right, cfg.n_cells)
    n_active = round((cfg.x_interface - cfg.x_left) / dx)
    return Grid(cfg.x_left, cfg.x_interface, cfg.x_interface, n_active)


def initial_state(cfg: RunConfig, grid: Grid) -> State:
    return State.uniform(grid, h=cfg.h0, u=cfg.u0, zb=cfg.zb0)


def make_strategy(cfg: RunConfig) -> BoundaryStrategy:
    if cfg.bc == "nc":
        return BoundaryStrategy.neumann()
    if cfg.bc == "sc":
        return BoundaryStrategy.simple_wave(cfg.h0, cfg.u0, cfg.params.g)
    return BoundaryStrategy.absorbing(cfg.sigma)


def max_wave_speed(state: State, params: PhysicalParams) -> float:
    """Largest |lambda| over owned cells from the asymptotic eigenvalues."""
    h = state.h()[1:-1]
    u = state.q[1:-1] / h
    lam = float(np.max(approx_eigenvalues(h, u, params).max_abs()))
    if not np.isfinite(lam):
        raise SimulationAbort(f"non-finite wave speed {lam}")
    return lam


def compute_dt(
    state: State,
    grid: Grid,
    params: PhysicalParams,
    cfl: float,
    t: float,
    events: list[float],
    fixed_dt: float | None = None,
) -> tuple[float, float, float | None]:
    """Step size CFL dx / lambda_max, clamped to hit the next event exactly.

    Returns (dt, lambda_max, hit) where hit is the event time reached by
    this step or None.  Event times already reached compare <= t exactly
    because the caller assigns t = hit on clamped steps.
    """
    lam = max_wave_speed(state, params)
    dt = fixed_dt if fixed_dt is not None else cfl * grid.dx / lam
    for ev in events:
        if ev > t:
            sliver = _EVENT_RTOL * max(1.0, abs(ev))
            if t + dt >= ev - sliver:
                return ev - t, lam, ev
            return dt, lam, None
    return dt, lam, None


def material_cfl(state: State, dt: float, dx: float) -> float:
    """u_max dt / dx over owned cells."""
    u = state.q[1:-1] / state.h()[1:-1]
    return float(np.max(np.abs(u))) * dt / dx


def run(cfg: RunConfig, initial: State | None = None) -> RunResult:
    """Advance the configured scenario to t_final, collecting snapshots.

    Aborts with the offending step's diagnostics when MCFL reaches 1 or
    the depth collapses.  Identical configs produce bit-identical output.
    """
    cfg.validate()
    grid = make_grid(cfg)
    state = initial.copy() if initial is not None else initial_state(cfg, grid)
    if state.n != grid.n_cells:
        raise ConfigError(
            f"initial state has {state.n} cells, grid {grid.n_cells}"
        )
    strategy = make_strategy(cfg)
    ref = state.copy() if cfg.bc == "ac" else None
    step = first_order_step if cfg.scheme == "first" else second_order_step

    events = sorted({*cfg.snapshot_times, cfg.t_final})
    snap_times = set(cfg.snapshot_times)
    snapshots: list[tuple[float, State]] = []
    if 0.0 in snap_times:
        snapshots.append((0.0, state.copy()))

    diagnostics: list[StepDiagnostics] = []
    eta_outflow = zb_outflow = 0.0
    t = 0.0
    while t < cfg.t_final:
        dt, lam, hit = compute_dt(
            state, grid, cfg.params, cfg.cfl, t, events, cfg.fixed_dt
        )
        state, budget = step(
            state, t, dt, cfg.params, grid, strategy, cfg.forcing, ref=ref
        )
        t = hit if hit is not None else t + dt
        eta_outflow += budget.eta_outflow
        zb_outflow += budget.zb_outflow

        h = state.h()[1:-1]
        diag = StepDiagnostics(
            t=t,
            dt=dt,
            mcfl=material_cfl(state, dt, grid.dx),
            lambda_max=lam,
            total_eta=grid.dx * state.eta[1:-1].sum(),
            total_zb=grid.dx * state.zb[1:-1].sum(),
            max_abs_u=float(np.max(np.abs(state.q[1:-1] / h))),
            min_h=float(h.min()),
        )
        diagnostics.append(diag)
        if diag.mcfl >= 1.0:
            raise SimulationAbort(
                f"material CFL {diag.mcfl:.3f} >= 1 at t={t:.6g}", diag
            )
        if diag.min_h <= 0.0:
            raise SimulationAbort(f"depth collapsed at t={t:.6g}", diag)
        if hit is not None and hit in snap_times:
            snapshots.append((hit, state.copy()))

    return RunResult(
        grid=grid,
        snapshots=snapshots,
        diagnostics=diagnostics,
        initial=initial.copy() if initial is not None else initial_state(cfg, grid),
        strategy=strategy,
        eta_outflow=eta_outflow,
        zb_outflow=zb_outflow,
    )


def _snapshot_at(result: RunResult, t_probe: float) -> State:
    for t, snap in result.snapshots:
        if t == t_probe:
            return snap
    raise ValueError(f"no snapshot at t={t_probe}")


def reflection_metric(
    result: RunResult,
    reference: RunResult,
    region: tuple[float, float],
    t_probe: float,
) -> ReflectionMetric:
    """Linf and L2 norms of the depth mismatch over the physical region.

    The reference is the same scenario on a domain long enough that no
    wave returns from its far boundary before t_probe; both runs must
    share x_left and dx so the region maps onto the same cells.
    """
    ga, gr = result.grid, reference.grid
    if abs(ga.dx - gr.dx) > 1e-12 * ga.dx or ga.x_left != gr.x_left:
        raise ValueError("runs do not share grid resolution over the region")
    lo, hi = region
    snap_a = _snapshot_at(result, t_probe)
    snap_r = _snapshot_at(reference, t_probe)
    mask_a = (ga.centers() >= lo) & (ga.centers() <= hi)
    mask_r = (gr.centers() >= lo) & (gr.centers() <= hi)
    if mask_a.sum() != mask_r.sum() or mask_a.sum() == 0:
        raise ValueError(f"region {region} not covered by both runs")
    diff = snap_a.h()[1:-1][mask_a] - snap_r.h()[1:-1][mask_r]
    return ReflectionMetric(
        linf=float(np.max(np.abs(diff))),
        l2=float(np.sqrt(ga.dx * np.sum(diff**2))),
    )


def extended_reference_config(cfg: RunConfig, margin: float = 1.3) -> RunConfig:
    """NC run on a domain long enough that no wave returns by the last probe.

    The far boundary sits at least margin * lambda3 * t_max beyond the
    interface, rounded up to whole cells of the configured dx.
    """
    lam3 = float(
        approx_eigenvalues(cfg.h0, cfg.u0, cfg.params).lambda3
    ) + cfg.forcing.amplitude
    t_max = max((*cfg.snapshot_times, cfg.t_final))
    dx = (cfg.x_right - cfg.x_left) / cfg.n_cells
    reach = margin * lam3 * t_max
    n_far = int(np.ceil((cfg.x_interface + reach - cfg.x_left) / dx))
    x_far = cfg.x_left + n_far * dx
    return replace(
        cfg, bc="nc", x_interface=x_far, x_right=x_far, n_cells=n_far
    )

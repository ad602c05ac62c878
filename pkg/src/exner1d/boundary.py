"""Ghost-cell closures: forced inflow on the left, NC / SC / AC on the right.

The left boundary imposes a velocity wave train u(x_L, t) = phi(t) together
with a compatibility condition on the depth, written into the single left
ghost cell.  The right boundary is one of:

  nc  zero-Neumann copy of the last cell on every field,
  sc  a flat-bottom simple-wave model of the outgoing characteristic,
  ac  an absorbing layer appended to the domain (outer edge then uses nc).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import ConfigError, NegativeDepthError
from .model import PhysicalParams, PrimitiveCell
from .spatial import AffineGhost, Grid

if TYPE_CHECKING:
    from .stepper import State

RIGHT_BOUNDARY_KINDS = ("nc", "sc", "ac")


@dataclass(frozen=True)
class WaveTrainForcing:
    """Inflow velocity phi(t) = u_mean + amplitude * sin(omega t)."""

    u_mean: float = 0.2
    amplitude: float = 0.01
    omega: float = 14.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")

    def phi(self, t: float) -> float:
        return self.u_mean + self.amplitude * np.sin(self.omega * t)

    def phi_t(self, t: float) -> float:
        return self.amplitude * self.omega * np.cos(self.omega * t)


@dataclass(frozen=True)
class SimpleWaveState:
    """Persisted ghost invariants for the simple-wave boundary.

    w3_ghost is the outgoing invariant u + 2 sqrt(gh) advected onto the
    ghost; r_incoming is the incoming one, constant throughout a simple
    wave of the outgoing family, pinned to its initial uniform value.
    """

    w3_ghost: float
    r_incoming: float
    fallbacks: int = 0


@dataclass
class BoundaryStrategy:
    """Right-boundary treatment; SC carries mutable per-run ghost memory."""

    kind: str
    sigma: float | None = None
    wave: SimpleWaveState | None = None

    def __post_init__(self):
        if self.kind not in RIGHT_BOUNDARY_KINDS:
            raise ConfigError(f"unknown boundary kind {self.kind!r}")
        if self.kind == "ac" and (self.sigma is None or self.sigma <= 0):
            raise ConfigError("absorbing layer requires sigma > 0")

    @classmethod
    def neumann(cls) -> "BoundaryStrategy":
        return cls("nc")

    @classmethod
    def simple_wave(cls, h: float, u: float, g: float) -> "BoundaryStrategy":
        c0 = np.sqrt(g * h)
        return cls("sc", wave=SimpleWaveState(u + 2.0 * c0, u - 2.0 * c0))

    @classmethod
    def absorbing(cls, sigma: float) -> "BoundaryStrategy":
        return cls("ac", sigma=sigma)


@dataclass(frozen=True)
class ImplicitClosures:
    """Affine ghost relations for the implicit solve and the q predictors."""

    eta_left: AffineGhost
    eta_right: AffineGhost
    q_left: AffineGhost
    q_right: AffineGhost


def left_ghost(
    first: PrimitiveCell, forcing: WaveTrainForcing, t: float, dx: float, g: float
) -> PrimitiveCell:
    """Inflow ghost cell enforcing u = phi(t) and the depth compatibility.

    h0 = h1 + (phi_t dx + (u1^2 - phi^2)/2) / g,  u0 = 2 phi - u1.
    The sediment is assumed flat at the entrance, so zb copies over.
    """
    if first.h <= 0:
        raise NegativeDepthError("left ghost needs h > 0 in the first cell")
    phi = forcing.phi(t)
    h0 = first.h + (forcing.phi_t(t) * dx + 0.5 * (first.u**2 - phi**2)) / g
    if h0 <= 0:
        raise NegativeDepthError(
            f"inflow forcing drove the ghost depth to {h0} at t={t}"
        )
    return PrimitiveCell(h=h0, u=2.0 * phi - first.u, zb=first.zb, b=first.b)


def right_ghost_nc(last: PrimitiveCell) -> PrimitiveCell:
    """Zero-Neumann: the ghost repeats the last owned cell."""
    return last


def right_ghost_sc(
    last_cells: Sequence[PrimitiveCell],
    sw: SimpleWaveState,
    dt: float,
    dx: float,
    g: float,
) -> tuple[PrimitiveCell, SimpleWaveState]:
    """Simple-wave ghost for the outgoing characteristic family.

    The flow next to the boundary is modelled as a flat-bottom shallow
    water simple wave of the outgoing family: the incoming invariant
    R = u - 2 sqrt(gh) is constant throughout such a wave, so the ghost
    keeps its frozen initial value and never carries reflected content,
    while the outgoing one w = u + 2 sqrt(gh) satisfies a scalar
    Burgers-type equation and is advected onto the ghost by upwind steps
    of total size dt (dt = 0 reuses the stored value).  The time step
    targets the slow sediment scale and exceeds the explicit stability
    limit of the fast characteristic by the full CFL number, so the
    advance is split into unit-Courant sub-steps.  If the reconstructed
    ghost depth collapses the ghost falls back to a plain copy and the
    event is counted in the returned state.
    """
    last = last_cells[-1]
    w_last = last.u + 2.0 * np.sqrt(g * last.h)
    r_frozen = sw.r_incoming

    w = sw.w3_ghost
    if dt > 0:
        lam3 = 0.25 * (3.0 * w + r_frozen)
        n_sub = max(1, int(np.ceil((dt / dx) * abs(lam3) / 0.9)))
        sub = dt / n_sub
        for _ in range(n_sub):
            lam3 = 0.25 * (3.0 * w + r_frozen)
            w = w - (sub / dx) * lam3 * (w - w_last)
        sw = replace(sw, w3_ghost=w)

    c_ghost = 0.25 * (w - r_frozen)
    if c_ghost <= 0:
        return right_ghost_nc(last), replace(sw, fallbacks=sw.fallbacks + 1)
    h_ghost = c_ghost**2 / g
    u_ghost = 0.5 * (w + r_frozen)
    return PrimitiveCell(h=h_ghost, u=u_ghost, zb=last.zb, b=last.b), sw


def damping_profile(x, x_r: float, sigma: float):
    """Quadratic sponge ramp: 0 inside the physical region, ((x-x_r)/sigma)^2 beyond."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=float)
    ramp = (x - x_r) / sigma
    return np.where(x <= x_r, 0.0, ramp**2)


def _owned_cell(state: "State", index: int) -> PrimitiveCell:
    """Primitive view of an owned cell (index counts padded positions)."""
    h = state.eta[index] - state.b[index] - state.zb[index]
    if h <= 0:
        raise NegativeDepthError(f"cell {index} has non-positive depth {h}")
    return PrimitiveCell(
        h=h, u=state.q[index] / h, zb=state.zb[index], b=state.b[index]
    )


def fill_ghosts(
    state: "State",
    t: float,
    dt: float,
    strategy: BoundaryStrategy,
    forcing: WaveTrainForcing,
    grid: Grid,
    params: PhysicalParams,
) -> "State":
    """Populate both ghost cells in place; called before every reconstruction.

    dt > 0 additionally advances the SC invariant by one upwind step, so
    callers pass the step size exactly once per time step and zero within
    the remaining stages.
    """
    if strategy.kind == "ac" and not grid.has_absorbing:
        raise ConfigError("absorbing strategy needs a grid with a layer region")

    ghost = left_ghost(_owned_cell(state, 1), forcing, t, grid.dx, params.g)
    state.eta[0] = ghost.eta
    state.q[0] = ghost.q
    state.zb[0] = ghost.zb
    state.b[0] = ghost.b

    if strategy.kind == "sc":
        cells = (_owned_cell(state, -3), _owned_cell(state, -2))
        ghost, strategy.wave = right_ghost_sc(
            cells, strategy.wave, dt, grid.dx, params.g
        )
        state.eta[-1] = ghost.eta
        state.q[-1] = ghost.q
        state.zb[-1] = ghost.zb
        state.b[-1] = ghost.b
    else:
        # nc, and the outer edge of the absorbing layer: plain copy
        state.eta[-1] = state.eta[-2]
        state.q[-1] = state.q[-2]
        state.zb[-1] = state.zb[-2]
        state.b[-1] = state.b[-2]
    return state


def implicit_closures(
    state: "State",
    t: float,
    tau: float,
    strategy: BoundaryStrategy,
    forcing: WaveTrainForcing,
    grid: Grid,
    params: PhysicalParams,
) -> ImplicitClosures:
    """Ghost relations for eta and q at the implicit time level t.

    The inflow relations are kept affine in the boundary unknowns so the
    implicit solve sees them at its own time level: with zb and b copied,
    the depth compatibility h0 = h1 + corr(phi, u1) is exactly
    eta0 = eta1 + corr, and u0 = 2 phi - u1 turns into
    q0 = 2 phi h0 - (h0/h1) q1.  The q relation holds for the end-of-stage
    momentum, while the solver pads the predictor q* = q + tau g h D_x(eta),
    so the q closure carries that pressure correction explicitly; without
    it the inflow would inject an O(tau) momentum error into every passing
    wave.  The SC ghost is a known value (coef 0); the Neumann treatments
    tie the ghost to the adjacent unknown (coef 1), folding into the
    diagonal of the system.
    """
    first = _owned_cell(state, 1)
    phi = forcing.phi(t)
    corr = (forcing.phi_t(t) * grid.dx + 0.5 * (first.u**2 - phi**2)) / params.g
    h0 = first.h + corr
    if h0 <= 0:
        raise NegativeDepthError(
            f"inflow forcing drove the ghost depth to {h0} at t={t}"
        )
    eta_left = AffineGhost(1.0, corr)
    eta0 = state.eta[1] + corr
    grad_first = (state.eta[2] - eta0) / (2.0 * grid.dx)
    grad_ghost = (state.eta[1] - eta0) / grid.dx
    q_left = AffineGhost(
        -h0 / first.h,
        2.0 * phi * h0 + tau * params.g * h0 * (grad_first + grad_ghost),
    )

    if strategy.kind == "sc":
        cells = (_owned_cell(state, -3), _owned_cell(state, -2))
        ghost, strategy.wave = right_ghost_sc(
            cells, strategy.wave, 0.0, grid.dx, params.g
        )
        eta_right = AffineGhost(0.0, ghost.eta)
        q_right = AffineGhost(0.0, ghost.q)
    else:
        eta_right = AffineGhost(1.0, 0.0)
        q_right = AffineGhost(1.0, 0.0)
    return ImplicitClosures(eta_left, eta_right, q_left, q_right)

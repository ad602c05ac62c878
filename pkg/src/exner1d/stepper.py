"""Semi-implicit time integrators for the free-surface Exner system.

One elementary stage advances (eta, q, zb) by treating the sediment flux
and the momentum advection explicitly (MUSCL + Rusanov) while the fast
surface-wave coupling, D_x(q) in the eta equation and g h D_x(eta) in the
momentum equation, is implicit.  Eliminating the new q turns the implicit
pair into a single tridiagonal equation for the new free surface:

    q*      = q_base   - tau * Dhat_x(q u)|_E
    eta*    = eta_base - tau * Dhat_x(q_b)|_E - tau * D_x(q*)
    eta_new = eta* + g tau^2 D_x(h_E D_x(eta_new))      [tridiagonal solve]
    q_new   = q*   - tau * g h_E * D_x(eta_new)
    zb_new  = zb_base - tau * Dhat_x(q_b)|_E

With base = explicit = U^n and tau = dt this is the first-order scheme;
the second-order scheme runs two such stages through an IMEX double
Butcher tableau whose implicit part is stiffly accurate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import (
    BoundaryStrategy,
    WaveTrainForcing,
    damping_profile,
    fill_ghosts,
    implicit_closures,
)
from .errors import NegativeDepthError
from .model import PhysicalParams, grass_flux, grass_flux_derivatives
from .spatial import (
    Grid,
    assemble_eta_system,
    centered_gradient,
    divergence,
    pad_with_closure,
    reconstruct,
    rusanov_flux,
    thomas_solve,
)


@dataclass
class State:
    """Ghost-padded cell averages of (eta, q, zb) plus static bathymetry."""

    eta: np.ndarray
    q: np.ndarray
    zb: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        n = len(self.eta)
        if not (len(self.q) == len(self.zb) == len(self.b) == n):
            raise ValueError("state arrays must share one padded length")

    @property
    def n(self) -> int:
        return len(self.eta) - 2

    def h(self) -> np.ndarray:
        """Water thickness eta - b - zb (padded)."""
        return self.eta - self.b - self.zb

    def u(self) -> np.ndarray:
        """Velocity q / h (padded); ghosts must be current."""
        return self.q / self.h()

    def copy(self) -> "State":
        return State(self.eta.copy(), self.q.copy(), self.zb.copy(), self.b.copy())

    @classmethod
    def uniform(cls, grid: Grid, h: float, u: float, zb: float, b: float = 0.0):
        n = grid.n_cells + 2
        return cls(
            eta=np.full(n, h + b + zb),
            q=np.full(n, h * u),
            zb=np.full(n, zb),
            b=np.full(n, b),
        )

    @staticmethod
    def combine(ca: float, sa: "State", cb: float, sb: "State") -> "State":
        """Affine combination of the evolved fields (ca + cb = 1)."""
        return State(
            eta=ca * sa.eta + cb * sb.eta,
            q=ca * sa.q + cb * sb.q,
            zb=ca * sa.zb + cb * sb.zb,
            b=sa.b.copy(),
        )


@dataclass(frozen=True)
class ImexTableau:
    """Two-stage IMEX pair with gamma = 1 - 1/sqrt(2), c = 1/(2 gamma)."""

    gamma: float = 1.0 - 1.0 / np.sqrt(2.0)

    def __post_init__(self):
        if abs(self.gamma - (1.0 - 1.0 / np.sqrt(2.0))) > 1e-15:
            raise ValueError("gamma must equal 1 - 1/sqrt(2)")

    @property
    def c(self) -> float:
        return 1.0 / (2.0 * self.gamma)

    @property
    def a_explicit(self) -> np.ndarray:
        return np.array([[0.0, 0.0], [self.c, 0.0]])

    @property
    def a_implicit(self) -> np.ndarray:
        g = self.gamma
        return np.array([[g, 0.0], [1.0 - g, g]])

    @property
    def b(self) -> np.ndarray:
        return np.array([1.0 - self.gamma, self.gamma])

    def is_stiffly_accurate(self) -> bool:
        return bool(np.all(self.a_implicit[-1] == self.b))


DEFAULT_TABLEAU = ImexTableau()


@dataclass(frozen=True)
class Tendencies:
    """Rusanov divergences of the explicit fluxes plus their edge values."""

    div_qb: np.ndarray
    div_qu: np.ndarray
    flux_qb: np.ndarray
    flux_qu: np.ndarray


@dataclass
class StageOperands:
    """Inputs of one elementary semi-implicit stage.

    base is the accumulated explicit/implicit combination the stage adds
    onto, explicit the state where E-tagged terms are evaluated, tau the
    effective implicit weight times dt.  advance_dt is forwarded to the
    ghost filler so the SC invariant moves exactly once per time step.
    """

    base: State
    explicit: State
    tau: float
    t_explicit: float
    t_implicit: float
    advance_dt: float = 0.0

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")


@dataclass(frozen=True)
class StageBudget:
    """Net boundary outflow integrals: dx * sum(field_new - field_base) = -outflow."""

    eta_outflow: float = 0.0
    zb_outflow: float = 0.0

    def scaled(self, f: float) -> "StageBudget":
        return StageBudget(f * self.eta_outflow, f * self.zb_outflow)

    def __add__(self, other: "StageBudget") -> "StageBudget":
        return StageBudget(
            self.eta_outflow + other.eta_outflow, self.zb_outflow + other.zb_outflow
        )


def _sediment_speed(h, u, params: PhysicalParams):
    """Magnitude of the slow bed-wave speed, |beta u| / (1 - Fr^2)."""
    _, beta = grass_flux_derivatives(h, u, params)
    fr2 = u**2 / (params.g * h)
    return np.abs(beta * u) / np.maximum(1.0 - fr2, 1e-12)


def explicit_tendencies(
    state: State, params: PhysicalParams, grid: Grid
) -> Tendencies:
    """Divergences of the sediment flux q_b and momentum advection flux q u.

    Fields (eta, q, zb, b) are reconstructed at edges; the edge depth and
    velocity follow from them.  The momentum flux is dissipated on the q
    jump at the material speed max(|u-|, |u+|); the shared sediment flux
    is dissipated on the zb jump at the bed-wave speed, which vanishes
    together with the coupling so that div_qb == 0 exactly when A_g = 0.
    """
    eta = reconstruct(state.eta, grid)
    q = reconstruct(state.q, grid)
    zb = reconstruct(state.zb, grid)
    b = reconstruct(state.b, grid)

    h_m = eta.minus - b.minus - zb.minus
    h_p = eta.plus - b.plus - zb.plus
    if np.any(h_m <= 0) or np.any(h_p <= 0):
        raise NegativeDepthError("edge reconstruction produced h <= 0")
    u_m = q.minus / h_m
    u_p = q.plus / h_p
    alpha = np.maximum(np.abs(u_m), np.abs(u_p))
    alpha_bed = np.maximum(
        _sediment_speed(h_m, u_m, params), _sediment_speed(h_p, u_p, params)
    )

    flux_qb = rusanov_flux(
        grass_flux(u_m, params), grass_flux(u_p, params), zb.minus, zb.plus, alpha_bed
    )
    flux_qu = rusanov_flux(q.minus * u_m, q.plus * u_p, q.minus, q.plus, alpha)
    return Tendencies(
        div_qb=divergence(flux_qb, grid),
        div_qu=divergence(flux_qu, grid),
        flux_qb=flux_qb,
        flux_qu=flux_qu,
    )


def apply_absorbing_damping(
    eta_star: np.ndarray,
    q_star: np.ndarray,
    zb_new: np.ndarray,
    explicit: State,
    ref: State,
    grid: Grid,
    sigma: float,
    dt_eff: float,
):
    """Relax the explicit predictors towards the reference inside the layer.

    Subtracts dt_eff * (F - F0) * phi(x) from each predictor, phi being the
    quadratic sponge ramp (zero left of the interface).  Returns the damped
    triple plus the domain integrals of the eta and zb corrections for the
    conservation budget.
    """
    phi = damping_profile(grid.centers(), grid.x_interface, sigma)
    d_eta = dt_eff * (explicit.eta[1:-1] - ref.eta[1:-1]) * phi
    d_q = dt_eff * (explicit.q[1:-1] - ref.q[1:-1]) * phi
    d_zb = dt_eff * (explicit.zb[1:-1] - ref.zb[1:-1]) * phi
    return (
        eta_star - d_eta,
        q_star - d_q,
        zb_new - d_zb,
        grid.dx * d_eta.sum(),
        grid.dx * d_zb.sum(),
    )


def _pad_neutral(owned: np.ndarray) -> np.ndarray:
    """Padded copy with repeated end values; ghosts are refilled before use."""
    out = np.empty(len(owned) + 2)
    out[1:-1] = owned
    out[0] = owned[0]
    out[-1] = owned[-1]
    return out


def stage_solve(
    ops: StageOperands,
    params: PhysicalParams,
    grid: Grid,
    strategy: BoundaryStrategy,
    forcing: WaveTrainForcing,
    ref: State | None = None,
) -> tuple[State, StageBudget]:
    """One elementary semi-implicit stage; returns the stage state and budget."""
    if strategy.kind == "ac" and ref is None:
        raise ValueError("absorbing damping needs the reference state")

    expl = ops.explicit
    fill_ghosts(expl, ops.t_explicit, ops.advance_dt, strategy, forcing, grid, params)
    tend = explicit_tendencies(expl, params, grid)

    tau = ops.tau
    q_star = ops.base.q[1:-1] - tau * tend.div_qu
    eta_star = ops.base.eta[1:-1] - tau * tend.div_qb
    zb_new = ops.base.zb[1:-1] - tau * tend.div_qb

    damp_eta = damp_zb = 0.0
    if strategy.kind == "ac":
        eta_star, q_star, zb_new, damp_eta, damp_zb = apply_absorbing_damping(
            eta_star, q_star, zb_new, expl, ref, grid, strategy.sigma, tau
        )

    h_e = expl.h()

    def implicit_pass(closure_state: State):
        cl = implicit_closures(
            closure_state, ops.t_implicit, tau, strategy, forcing, grid, params
        )
        q_pad = pad_with_closure(q_star, cl.q_left, cl.q_right)
        star = eta_star - tau * centered_gradient(q_pad, grid)
        sys, rhs = assemble_eta_system(
            h_e, star, tau, params.g, grid, cl.eta_left, cl.eta_right
        )
        eta_new = thomas_solve(sys, rhs)
        eta_pad = pad_with_closure(eta_new, cl.eta_left, cl.eta_right)
        q_new = q_star - tau * params.g * h_e[1:-1] * centered_gradient(eta_pad, grid)
        return eta_new, eta_pad, q_new, q_pad

    # The closure relations hold at the implicit time level, but their
    # state coefficients are only available from the explicit input; one
    # rebuild from the provisional solution removes the O(tau) data lag
    # that would otherwise cap the wave-train accuracy at first order.
    eta_new, eta_new_pad, q_new, q_star_pad = implicit_pass(expl)
    provisional = State(
        eta=eta_new_pad, q=_pad_neutral(q_new), zb=_pad_neutral(zb_new),
        b=expl.b.copy(),
    )
    eta_new, eta_new_pad, q_new, q_star_pad = implicit_pass(provisional)

    h_new = eta_new - zb_new - expl.b[1:-1]
    if np.any(h_new <= 0):
        raise NegativeDepthError(
            f"stage produced min depth {h_new.min()} at t={ops.t_implicit}"
        )

    qb_term = tau * (tend.flux_qb[-1] - tend.flux_qb[0])
    centered_term = tau * 0.5 * (
        (q_star_pad[-1] + q_star_pad[-2]) - (q_star_pad[0] + q_star_pad[1])
    )
    implicit_term = params.g * tau**2 / grid.dx * (
        0.5 * (h_e[-1] + h_e[-2]) * (eta_new_pad[-1] - eta_new_pad[-2])
        - 0.5 * (h_e[0] + h_e[1]) * (eta_new_pad[1] - eta_new_pad[0])
    )
    budget = StageBudget(
        eta_outflow=qb_term + centered_term + damp_eta - implicit_term,
        zb_outflow=qb_term + damp_zb,
    )

    new = State(
        eta=eta_new_pad, q=_pad_neutral(q_new), zb=_pad_neutral(zb_new), b=expl.b.copy()
    )
    return new, budget


def first_order_step(
    state: State,
    t: float,
    dt: float,
    params: PhysicalParams,
    grid: Grid,
    strategy: BoundaryStrategy,
    forcing: WaveTrainForcing,
    ref: State | None = None,
) -> tuple[State, StageBudget]:
    """Single semi-implicit stage with base = explicit = U^n and tau = dt."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    ops = StageOperands(
        base=state,
        explicit=state,
        tau=dt,
        t_explicit=t,
        t_implicit=t + dt,
        advance_dt=dt,
    )
    return stage_solve(ops, params, grid, strategy, forcing, ref)


def second_order_step(
    state: State,
    t: float,
    dt: float,
    params: PhysicalParams,
    grid: Grid,
    strategy: BoundaryStrategy,
    forcing: WaveTrainForcing,
    ref: State | None = None,
    tableau: ImexTableau = DEFAULT_TABLEAU,
) -> tuple[State, StageBudget]:
    """Two-stage IMEX step; the stiffly accurate last stage is the result.

    Both stages reuse the elementary solve with tau = gamma dt.  The second
    stage's operands are affine combinations of U^n and the first stage,
    exploiting that all stage values share the first K evaluation.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    gam = tableau.gamma
    ops1 = StageOperands(
        base=state,
        explicit=state,
        tau=gam * dt,
        t_explicit=t,
        t_implicit=t + gam * dt,
        advance_dt=dt,
    )
    u1, budget1 = stage_solve(ops1, params, grid, strategy, forcing, ref)

    c_over_g = tableau.c / gam
    w = (1.0 - gam) / gam
    e2 = State.combine(1.0 - c_over_g, state, c_over_g, u1)
    base2 = State.combine(1.0 - w, state, w, u1)
    ops2 = StageOperands(
        base=base2,
        explicit=e2,
        tau=gam * dt,
        t_explicit=t + tableau.c * dt,
        t_implicit=t + dt,
    )
    u2, budget2 = stage_solve(ops2, params, grid, strategy, forcing, ref)
    return u2, budget1.scaled(w) + budget2

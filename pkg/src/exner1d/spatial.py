"""Discrete spatial operators on a uniform 1D mesh with one ghost cell per side.

Conventions: a padded field array has length n_cells + 2, entries [0] and
[-1] are ghosts.  Edge arrays have length n_cells + 1, edge e sits between
padded cells e and e+1, so edges 0 and n_cells touch the ghosts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
import scipy.linalg

from .errors import NegativeDepthError, SingularSystemError


@dataclass(frozen=True)
class Grid:
    """Uniform mesh over [x_left, x_right] with a cell-aligned interface.

    x_interface marks the right edge of the physical region; cells beyond
    it (present only when x_right > x_interface) form the absorbing layer.
    """

    x_left: float
    x_interface: float
    x_right: float
    n_cells: int
    n_ghost: int = 1

    def __post_init__(self):
        if self.n_cells < 2:
            raise ValueError(f"need at least 2 cells, got {self.n_cells}")
        if not self.x_left < self.x_interface <= self.x_right:
            raise ValueError(
                f"require x_left < x_interface <= x_right, got "
                f"({self.x_left}, {self.x_interface}, {self.x_right})"
            )
        if self.n_ghost != 1:
            raise ValueError("only one ghost cell per side is supported")
        k = (self.x_interface - self.x_left) / self.dx
        if abs(k - round(k)) > 1e-9 * self.n_cells:
            raise ValueError("x_interface must coincide with a cell edge")

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def interface_index(self) -> int:
        """Number of cells left of x_interface."""
        return round((self.x_interface - self.x_left) / self.dx)

    @property
    def has_absorbing(self) -> bool:
        return self.interface_index < self.n_cells

    def centers(self) -> np.ndarray:
        """Owned cell centers."""
        return self.x_left + (np.arange(self.n_cells) + 0.5) * self.dx

    def padded_centers(self) -> np.ndarray:
        return self.x_left + (np.arange(-1, self.n_cells + 1) + 0.5) * self.dx


class EdgeStates(NamedTuple):
    """Left (minus) and right (plus) limits at each edge."""

    minus: np.ndarray
    plus: np.ndarray


@dataclass(frozen=True)
class AffineGhost:
    """Ghost closure ghost = coef * adjacent_owned + const."""

    coef: float
    const: float

    def value(self, adjacent: float) -> float:
        return self.coef * adjacent + self.const


class Tridiag(NamedTuple):
    """Tridiagonal matrix; sub[0] and sup[-1] are unused (zero)."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray


def minmod(a, b):
    """Zero across sign changes, otherwise the smaller-magnitude slope."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    same_sign = a * b > 0
    picked = np.where(np.abs(a) < np.abs(b), a, b)
    return np.where(same_sign, picked, 0.0)


def reconstruct(padded: np.ndarray, grid: Grid) -> EdgeStates:
    """Piecewise-linear MinMod reconstruction of a padded field.

    Ghost cells get zero slope (their outer neighbour is unknown), so the
    outermost edge values fall back to the ghost averages.
    """
    n = grid.n_cells
    if len(padded) != n + 2:
        raise ValueError(f"expected {n + 2} values incl. ghosts, got {len(padded)}")
    slopes = np.zeros_like(padded)
    slopes[1:-1] = minmod(padded[1:-1] - padded[:-2], padded[2:] - padded[1:-1])
    minus = padded[:-1] + 0.5 * slopes[:-1]
    plus = padded[1:] - 0.5 * slopes[1:]
    return EdgeStates(minus, plus)


def rusanov_flux(f_minus, f_plus, w_minus, w_plus, alpha):
    """Central flux with dissipation on the jump of the advected field w."""
    return 0.5 * (f_minus + f_plus) - 0.5 * alpha * (w_plus - w_minus)


def divergence(edge_flux: np.ndarray, grid: Grid) -> np.ndarray:
    """Per-cell flux difference (F_{i+1/2} - F_{i-1/2}) / dx."""
    return (edge_flux[1:] - edge_flux[:-1]) / grid.dx


def rusanov_divergence(
    flux_of: Callable[[np.ndarray], np.ndarray],
    edges: EdgeStates,
    alpha_edge: np.ndarray,
    grid: Grid,
) -> np.ndarray:
    """Rusanov flux divergence of a scalar conservation law."""
    flux = rusanov_flux(
        flux_of(edges.minus), flux_of(edges.plus), edges.minus, edges.plus, alpha_edge
    )
    return divergence(flux, grid)


def centered_gradient(padded: np.ndarray, grid: Grid) -> np.ndarray:
    """Two-point centered difference (v_{i+1} - v_{i-1}) / (2 dx)."""
    return (padded[2:] - padded[:-2]) / (2.0 * grid.dx)


def pad_with_closure(
    owned: np.ndarray, left: AffineGhost, right: AffineGhost
) -> np.ndarray:
    """Attach ghost values defined by affine closures on the end cells."""
    padded = np.empty(len(owned) + 2)
    padded[1:-1] = owned
    padded[0] = left.value(owned[0])
    padded[-1] = right.value(owned[-1])
    return padded


def assemble_eta_system(
    h_padded: np.ndarray,
    eta_star: np.ndarray,
    dt_eff: float,
    g: float,
    grid: Grid,
    left: AffineGhost,
    right: AffineGhost,
) -> tuple[Tridiag, np.ndarray]:
    """Build (I - g dt^2 D_x(h D_x .)) eta = eta_star as a tridiagonal system.

    The diffusion stencil is the compact h-weighted second difference with
    h_{i+1/2} = (h_i + h_{i+1}) / 2.  Ghost eta obeys the affine closures:
    the coefficient part folds into the boundary diagonals, the constant
    part into the right-hand side, keeping the system n_cells by n_cells.
    """
    n = grid.n_cells
    if np.any(h_padded <= 0):
        raise NegativeDepthError("implicit surface operator requires h > 0")
    d = g * dt_eff**2 / grid.dx**2
    h_edge = 0.5 * (h_padded[:-1] + h_padded[1:])  # length n + 1

    sub = np.zeros(n)
    sup = np.zeros(n)
    diag = 1.0 + d * (h_edge[1:] + h_edge[:-1])
    sub[1:] = -d * h_edge[1:-1]
    sup[:-1] = -d * h_edge[1:-1]
    rhs = np.array(eta_star, dtype=float)

    diag[0] -= d * h_edge[0] * left.coef
    rhs[0] += d * h_edge[0] * left.const
    diag[-1] -= d * h_edge[-1] * right.coef
    rhs[-1] += d * h_edge[-1] * right.const
    return Tridiag(sub, diag, sup), rhs


def thomas_solve(sys: Tridiag, rhs: np.ndarray) -> np.ndarray:
    """Solve the tridiagonal system via LAPACK's banded elimination."""
    n = len(sys.diag)
    ab = np.zeros((3, n))
    ab[0, 1:] = sys.sup[:-1]
    ab[1, :] = sys.diag
    ab[2, :-1] = sys.sub[1:]
    try:
        x = scipy.linalg.solve_banded(
            (1, 1), ab, rhs, overwrite_ab=True, overwrite_b=False, check_finite=False
        )
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("tridiagonal solve produced non-finite values")
    return x

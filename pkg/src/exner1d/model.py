"""Physical closures and wave-speed analysis for the 1D Exner system.

The model couples the shallow water equations to a movable sediment layer
through the Grass bed-load formula q_b = xi * A_g * u * |u|**(m-1).  All
functions here are pure and accept scalars or numpy arrays for the flow
fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NegativeDepthError, NonHyperbolicError

# Relative tolerance on the cubic discriminant below which the system is
# reported as non-hyperbolic (roots not three distinct reals).
DISCRIMINANT_RTOL = 1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """Gravity plus the Grass closure constants.

    xi = 1/(1 - rho0) is always derived from the porosity, never stored.
    """

    g: float = 9.81
    a_g: float = 0.1
    m: float = 3.0
    rho0: float = 0.2

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError(f"g must be positive, got {self.g}")
        if self.a_g < 0:
            raise ValueError(f"a_g must be non-negative, got {self.a_g}")
        if not 1.0 <= self.m <= 4.0:
            raise ValueError(f"m must lie in [1, 4], got {self.m}")
        if not 0.0 <= self.rho0 < 1.0:
            raise ValueError(f"rho0 must lie in [0, 1), got {self.rho0}")

    @property
    def xi(self) -> float:
        return 1.0 / (1.0 - self.rho0)


@dataclass(frozen=True)
class PrimitiveCell:
    """Primitive flow state of a single cell: depth, velocity, bed layers."""

    h: float
    u: float
    zb: float = 0.0
    b: float = 0.0

    @property
    def q(self) -> float:
        return self.h * self.u

    @property
    def surface(self) -> float:
        """Total bottom height b + zb."""
        return self.b + self.zb

    @property
    def eta(self) -> float:
        """Free-surface elevation h + b + zb."""
        return self.h + self.b + self.zb


@dataclass(frozen=True)
class EigenTriple:
    """Sorted wave speeds lambda1 < lambda2 < lambda3."""

    lambda1: float | np.ndarray
    lambda2: float | np.ndarray
    lambda3: float | np.ndarray

    def max_abs(self) -> float | np.ndarray:
        return np.maximum(
            np.abs(self.lambda1),
            np.maximum(np.abs(self.lambda2), np.abs(self.lambda3)),
        )


def grass_flux(u, p: PhysicalParams):
    """Sediment flux q_b = xi * A_g * u * |u|**(m-1).

    Odd in u and total (no restriction on the sign of the velocity).
    """
    u = np.asarray(u, dtype=float)
    return p.xi * p.a_g * u * np.abs(u) ** (p.m - 1.0)


def grass_flux_derivatives(h, u, p: PhysicalParams):
    """Return (alpha, beta) = (d q_b / d h, d q_b / d q).

    beta = m * xi * A_g * |u|**(m-1) / h and alpha = -u * beta.  The
    absolute value extends the usual u > 0 formula so that beta stays
    non-negative for reversed flow.
    """
    h = np.asarray(h, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(h <= 0):
        raise NegativeDepthError("grass_flux_derivatives requires h > 0")
    beta = p.m * p.xi * p.a_g * np.abs(u) ** (p.m - 1.0) / h
    alpha = -u * beta
    return alpha, beta


def froude(h, u, g: float):
    """Local Froude number |u| / sqrt(g h)."""
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise NegativeDepthError("froude requires h > 0")
    return np.abs(u) / np.sqrt(g * h)


def approx_eigenvalues(h, u, p: PhysicalParams) -> EigenTriple:
    """Wave speeds from the small-beta expansion, O(beta^2) terms dropped.

    Valid only for subcritical states (Froude < 1): the corrections carry
    1/(1 - Fr) and 1/(1 - Fr^2) factors.
    """
    h = np.asarray(h, dtype=float)
    u = np.asarray(u, dtype=float)
    fr = froude(h, u, p.g)
    if np.any(fr >= 1.0):
        raise NonHyperbolicError(
            f"asymptotic wave speeds need Froude < 1, got max {np.max(fr)}"
        )
    c = np.sqrt(p.g * h)
    _, beta = grass_flux_derivatives(h, u, p)
    lam1 = u - c - beta * c / (2.0 * (1.0 - fr))
    lam2 = beta * u / (1.0 - fr**2)
    lam3 = u + c + beta * c / (2.0 * (1.0 + fr))
    return EigenTriple(lam1, lam2, lam3)


def exact_eigenvalues(h, u, p: PhysicalParams) -> EigenTriple:
    """Sorted real roots of the characteristic cubic.

    The quasilinear coupling matrix of the (h, q, b+zb) form has
    characteristic polynomial

        lambda^3 - 2u lambda^2 + (u^2 - gh - gh beta) lambda + gh beta u = 0

    solved with the trigonometric method for three real roots.  Raises
    NonHyperbolicError when the discriminant is not safely positive.
    """
    h = np.asarray(h, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(h <= 0):
        raise NegativeDepthError("exact_eigenvalues requires h > 0")
    _, beta = grass_flux_derivatives(h, u, p)
    gh = p.g * h

    a2 = -2.0 * u
    a1 = u**2 - gh - gh * beta
    a0 = gh * beta * u

    # Depressed cubic t^3 + P t + Q with lambda = t - a2/3.
    pp = a1 - a2**2 / 3.0
    qq = 2.0 * a2**3 / 27.0 - a2 * a1 / 3.0 + a0

    disc = -(4.0 * pp**3 + 27.0 * qq**2)
    scale = np.maximum(4.0 * np.abs(pp) ** 3, 27.0 * qq**2)
    if np.any(disc <= DISCRIMINANT_RTOL * scale):
        raise NonHyperbolicError(
            "characteristic cubic does not have three distinct real roots"
        )

    r = 2.0 * np.sqrt(-pp / 3.0)
    arg = np.clip(3.0 * qq / (pp * r), -1.0, 1.0)
    theta = np.arccos(arg)
    shift = -a2 / 3.0
    roots = [r * np.cos((theta - 2.0 * np.pi * k) / 3.0) + shift for k in range(3)]
    lam = np.sort(np.stack(roots, axis=-1), axis=-1)
    return EigenTriple(lam[..., 0], lam[..., 1], lam[..., 2])


def characteristic_polynomial(lam, h, u, beta, g: float):
    """Evaluate p(lambda) = -lam ((u-lam)^2 - gh) + gh beta (lam - u)."""
    gh = g * np.asarray(h, dtype=float)
    return -lam * ((u - lam) ** 2 - gh) + gh * beta * (lam - u)

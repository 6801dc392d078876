"""Closed-form scalar functions of the traffic model.

All quantities are normalized to a jam density of 1.  For a road segment
with speed limit ``gamma`` the fundamental diagram is the concave parabola

    f(gamma, rho) = gamma * rho * (1 - rho),       rho in [0, 1],

with mean speed v(gamma, rho) = gamma * (1 - rho).  A slow vehicle with
maximal speed ``v_b < gamma`` caps the flux in its co-moving frame by

    f(gamma, rho) - ydot * rho  <=  alpha / (4 gamma) * (gamma - ydot)^2

where ``alpha`` in (0, 1) is the capacity-reduction factor.  The two
densities where the cap line ``v_b * rho + F_alpha`` meets the fundamental
diagram are ``rho_check < rho_hat``; a non-classical discontinuity can only
connect these two states and only along the slow vehicle's path.

The state map

    psi(gamma, rho) = (gamma / 4) * sign(rho - 1/2) * (2 rho - 1)^2

is, for each fixed gamma, a strictly increasing bijection from [0, 1] onto
[-gamma/4, gamma/4]; its inverse is ``psi_inv``.  Working in (z, gamma)
coordinates makes stationary speed-limit jumps straight lines of slope
+-1/4 and is what every variation bound in the package is stated in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError


@dataclass(frozen=True)
class ModelParams:
    """Global model constants: jam density is fixed to 1."""

    alpha: float
    rho_max: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.rho_max != 1.0:
            raise ConfigError("rho_max is normalized to 1")


@dataclass(frozen=True)
class RegionParams:
    """Per-region speed limit and bottleneck maximal speed."""

    gamma: float
    v_b: float

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ConfigError(f"gamma must be positive, got {self.gamma}")
        if not 0.0 <= self.v_b < self.gamma:
            raise ConfigError(
                f"need 0 <= v_b < gamma, got v_b={self.v_b}, gamma={self.gamma}"
            )


@dataclass(frozen=True)
class CriticalDensities:
    """Intersection densities of the capacity cap with the fundamental diagram.

    rho_check < rho_hat are the two roots of
    f(gamma, rho) = F_alpha + v_b * rho; rho_star is the density above which
    traffic moves slower than the bottleneck's maximal speed.
    """

    rho_check: float
    rho_hat: float
    rho_star: float


def _check_density(rho: float) -> None:
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"density must lie in [0, 1], got {rho}")


def flux(gamma: float, rho: float) -> float:
    """Parabolic flux gamma * rho * (1 - rho)."""
    _check_density(rho)
    return gamma * rho * (1.0 - rho)


def velocity(gamma: float, rho: float) -> float:
    """Mean traffic speed gamma * (1 - rho)."""
    _check_density(rho)
    return gamma * (1.0 - rho)


def f_alpha_capacity(region: RegionParams, alpha: float, ydot: float) -> float:
    """Reduced-capacity cap alpha / (4 gamma) * (gamma - ydot)^2.

    Vanishes at ydot = gamma, and f(gamma, rho) - v(gamma, rho) * rho = 0
    for every rho, so a vehicle moving with the traffic never violates it.
    """
    g = region.gamma
    return alpha / (4.0 * g) * (g - ydot) * (g - ydot)


def rho_star(region: RegionParams) -> float:
    """Density threshold 1 - v_b / gamma where traffic slows below v_b."""
    return 1.0 - region.v_b / region.gamma


def critical_densities(region: RegionParams, alpha: float) -> CriticalDensities:
    """Roots of f(gamma, rho) = F_alpha + v_b * rho, in closed form.

    The quadratic has discriminant (1 - alpha) (gamma - v_b)^2 > 0, so

        rho_check, rho_hat = (gamma - v_b) (1 -+ sqrt(1 - alpha)) / (2 gamma).
    """
    g, vb = region.gamma, region.v_b
    root = math.sqrt(1.0 - alpha)
    rho_check = (g - vb) * (1.0 - root) / (2.0 * g)
    rho_hat = (g - vb) * (1.0 + root) / (2.0 * g)
    return CriticalDensities(rho_check=rho_check, rho_hat=rho_hat, rho_star=rho_star(region))


def shock_speed(gamma: float, rho1: float, rho2: float) -> float:
    """Rankine-Hugoniot speed of the jump between rho1 and rho2.

    For the parabolic flux the chord slope collapses to gamma * (1 - rho1 - rho2).
    """
    if rho1 == rho2:
        raise ValueError("shock speed undefined for rho1 == rho2")
    return gamma * (1.0 - rho1 - rho2)


def _sign(x: float) -> float:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


def psi(gamma: float, rho: float) -> float:
    """State map (gamma/4) * sign(rho - 1/2) * (2 rho - 1)^2, with sign(0) = 0."""
    _check_density(rho)
    d = 2.0 * rho - 1.0
    return 0.25 * gamma * _sign(d) * d * d


def psi_inv(gamma: float, z: float) -> float:
    """Inverse state map 1/2 * (1 + sign(z) * sqrt(4 |z| / gamma))."""
    if abs(z) > 0.25 * gamma * (1.0 + 1e-12):
        raise ValueError(f"|z| must not exceed gamma/4, got z={z}, gamma={gamma}")
    mag = min(abs(z), 0.25 * gamma)
    return 0.5 * (1.0 + _sign(z) * math.sqrt(4.0 * mag / gamma))

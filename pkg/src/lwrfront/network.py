"""Road network: ordered region boundaries with per-region parameters."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError
from .flux import RegionParams

# Largest power-of-two denominator accepted for a speed limit.  Keeps the
# base-grid integer alignment k = gamma * 2^n reachable at practical levels.
MAX_DYADIC_DEPTH = 20


def dyadic_exponent(value: float, max_depth: int = MAX_DYADIC_DEPTH) -> int:
    """Smallest p with value * 2^p integer, or raise if p would exceed max_depth."""
    if value <= 0.0:
        raise ConfigError(f"expected a positive value, got {value}")
    num, den = float(value).as_integer_ratio()
    p = den.bit_length() - 1  # den is a power of two for any float
    if p > max_depth:
        raise ConfigError(
            f"gamma={value} is not dyadic (denominator 2^{p} exceeds 2^{max_depth})"
        )
    return p


@dataclass(frozen=True)
class RoadNetwork:
    """Boundaries a_1 < ... < a_M splitting the line into M+1 regions.

    Region m covers [a_m, a_{m+1}) with region 0 extending to -inf and
    region M to +inf.  Each region carries a speed limit gamma (required
    dyadic) and a bottleneck maximal speed v_b < gamma.
    """

    boundaries: tuple[float, ...]
    regions: tuple[RegionParams, ...]
    alpha: float
    _dyadic: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.regions) != len(self.boundaries) + 1:
            raise ConfigError(
                f"{len(self.boundaries)} boundaries require "
                f"{len(self.boundaries) + 1} regions, got {len(self.regions)}"
            )
        if any(b2 <= b1 for b1, b2 in zip(self.boundaries, self.boundaries[1:])):
            raise ConfigError("boundaries must be strictly increasing")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        object.__setattr__(
            self, "_dyadic", tuple(dyadic_exponent(r.gamma) for r in self.regions)
        )

    @property
    def num_regions(self) -> int:
        return len(self.regions)

    def region_of(self, x: float) -> int:
        """Index m of the region containing x (right-continuous at boundaries)."""
        m = 0
        for b in self.boundaries:
            if x >= b:
                m += 1
            else:
                break
        return m

    def gamma_of(self, m: int) -> float:
        return self.regions[m].gamma

    def next_boundary(self, m: int) -> float:
        """Right endpoint of region m (inf for the last region)."""
        return self.boundaries[m] if m < len(self.boundaries) else float("inf")

    def alignment_level(self) -> int:
        """Smallest n making gamma * 2^n integral for every region."""
        return max(self._dyadic) if self._dyadic else 0

    def tv_gamma(self) -> float:
        """Total variation of the speed-limit profile."""
        gammas = [r.gamma for r in self.regions]
        return sum(abs(b - a) for a, b in zip(gammas, gammas[1:]))

    def max_gamma(self) -> float:
        return max(r.gamma for r in self.regions)

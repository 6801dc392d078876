"""Per-region state grids at refinement level n.

The base grid in z-coordinates is the dyadic lattice z = j / 2^(n+2),
j in [-k, k] with k = gamma * 2^n, so the flux value of a base node,
f = gamma/4 - |z|, is itself a lattice point (k - |j|) / 2^(n+2).  Because
every region uses the same lattice spacing, equal-flux partners across
regions exist exactly, which is what keeps Riemann traces on the grid.

On top of the base lattice each region receives the special densities
rho_check, rho_hat, rho_star of *every* region, materialized as the pair of
nodes at the corresponding flux level (the two roots of the flux quadratic,
i.e. a point and its reflection through rho = 1/2), whenever that level
does not exceed the region's capacity gamma/4.

Pruning then removes, for each special point, the nearest base node (never
the anchors z in {-gamma/4, 0, gamma/4}) together with all its equal-flux
partners and reflections in every region, leaving adjacent gaps inside
[delta_lo, delta_hi) = [hat/2, 2*hat).

Nodes carry a canonical ``level`` (flux value): one float per special
point, shared bitwise across regions, and exact dyadics for base nodes.
All cross-region matching is plain float equality on that level.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import NamedTuple

from . import flux as fx
from .errors import ConfigError, DegenerateGridError, InternalConsistencyError, PruningError
from .network import RoadNetwork

# Refinement levels beyond this indicate (near-)coincident special points.
MAX_LEVEL = 24

_TAG_PRIORITY = {
    "rho_hat": 5,
    "rho_check": 5,
    "rho_star": 5,
    "symmetric": 4,
    "projection": 3,
    "base": 1,
}


class Ref(NamedTuple):
    """Identity of a grid state: (region index, node index)."""

    region: int
    index: int


@dataclass(frozen=True)
class GridNode:
    z: float
    rho: float
    level: float  # flux value gamma/4 - |z|, canonical across regions
    side: int  # sign(rho - 1/2)
    tag: str


@dataclass(frozen=True)
class _Special:
    kind: str  # rho_hat | rho_check | rho_star
    source_region: int
    level: float
    rho: float  # exact closed-form density in the source region


def base_grid(n: int, gamma: float) -> list[float]:
    """Dyadic z-lattice j / 2^(n+2), j in [-k, k], for k = gamma * 2^n."""
    k = _aligned_k(n, gamma)
    hat = 2.0 ** -(n + 2)
    return [j * hat for j in range(-k, k + 1)]


def _aligned_k(n: int, gamma: float) -> int:
    kf = gamma * (1 << n)
    k = round(kf)
    if kf != k:
        raise ConfigError(f"gamma={gamma} is not aligned at level n={n} (gamma*2^n not integer)")
    return k


def critical_levels(network: RoadNetwork, m: int) -> tuple[float, float, float]:
    """Canonical flux levels (check, hat, star) of region m.

    The check/hat levels are computed as F_alpha + v_b * rho so that the
    constrained-solver case conditions hit exact ties at these states.
    """
    region = network.regions[m]
    crit = fx.critical_densities(region, network.alpha)
    cap = fx.f_alpha_capacity(region, network.alpha, region.v_b)
    return (
        cap + region.v_b * crit.rho_check,
        cap + region.v_b * crit.rho_hat,
        fx.flux(region.gamma, crit.rho_star),
    )


def _all_specials(network: RoadNetwork) -> list[_Special]:
    out = []
    for m, region in enumerate(network.regions):
        crit = fx.critical_densities(region, network.alpha)
        lv_check, lv_hat, lv_star = critical_levels(network, m)
        out.append(_Special("rho_check", m, lv_check, crit.rho_check))
        out.append(_Special("rho_hat", m, lv_hat, crit.rho_hat))
        out.append(_Special("rho_star", m, lv_star, crit.rho_star))
        # The capacity gamma/4 is a fixed flux level of the Riemann solver
        # (any saturated demand or supply lands there), so its equal-flux
        # partners must stay grid points in every region as well.
        out.append(_Special("apex", m, 0.25 * region.gamma, 0.5))
    return out


@dataclass
class _SpecialNode:
    z: float
    level: float
    rho: float
    tag: str
    kinds: set[str]


def _region_specials(network: RoadNetwork) -> list[dict[float, _SpecialNode]]:
    """Materialize every special flux level as z-nodes in every region."""
    specials = _all_specials(network)
    per_region: list[dict[float, _SpecialNode]] = []
    for m, region in enumerate(network.regions):
        apex = 0.25 * region.gamma
        zmap: dict[float, _SpecialNode] = {}

        def put(z, level, rho, tag, kind):
            node = zmap.get(z)
            if node is None:
                zmap[z] = _SpecialNode(z, level, rho, tag, {kind})
                return
            node.kinds.add(kind)
            if _TAG_PRIORITY[tag] > _TAG_PRIORITY[node.tag]:
                node.tag = tag
                node.rho = rho
                node.level = level

        for sp in specials:
            width = apex - sp.level
            if width < 0.0:
                continue
            if sp.kind == "apex":
                if width > 0.0:  # own apex is already the z = 0 anchor
                    rho_hi = fx.psi_inv(region.gamma, width)
                    put(width, sp.level, rho_hi, "projection", sp.kind)
                    put(-width, sp.level, 1.0 - rho_hi, "projection", sp.kind)
                continue
            if sp.source_region == m:
                own_side = 1 if sp.rho > 0.5 else (-1 if sp.rho < 0.5 else 0)
                if own_side == 0:
                    put(0.0, sp.level, 0.5, sp.kind, sp.kind)
                    continue
                put(own_side * width, sp.level, sp.rho, sp.kind, sp.kind)
                put(-own_side * width, sp.level, 1.0 - sp.rho, "symmetric", sp.kind)
            elif width == 0.0:
                put(0.0, sp.level, 0.5, "projection", sp.kind)
            else:
                rho_hi = fx.psi_inv(region.gamma, width)
                put(width, sp.level, rho_hi, "projection", sp.kind)
                put(-width, sp.level, 1.0 - rho_hi, "projection", sp.kind)
        per_region.append(zmap)
    return per_region


def special_points(network: RoadNetwork) -> list[dict[str, tuple[float, ...]]]:
    """Per-region density sets keyed by source kind (hat / check / star).

    Each set contains the region's own point, its reflection through 1/2,
    and the projections of every other region's point of that kind (both
    quadratic roots) when they exist in [0, 1].
    """
    out = []
    for zmap in _region_specials(network):
        sets: dict[str, set[float]] = {"rho_hat": set(), "rho_check": set(), "rho_star": set()}
        for node in zmap.values():
            for kind in node.kinds:
                if kind in sets:
                    sets[kind].add(node.rho)
        out.append({k: tuple(sorted(v)) for k, v in sets.items()})
    return out


def min_special_gap(network: RoadNetwork) -> float:
    """Least distance between fixed z-points (specials and anchors) of any region."""
    delta = math.inf
    for m, zmap in enumerate(_region_specials(network)):
        apex = 0.25 * network.regions[m].gamma
        zs = sorted(set(zmap) | {-apex, 0.0, apex})
        for a, b in zip(zs, zs[1:]):
            delta = min(delta, b - a)
    return delta


def level_from_min_gap(delta_min: float) -> int:
    """Unique n with 1/2^(n+2) <= delta_min < 1/2^(n+1), clamped at 0."""
    if delta_min <= 0.0:
        raise DegenerateGridError("coincident special points (delta_min = 0)")
    _, exp = math.frexp(delta_min)  # delta_min in [2^(exp-1), 2^exp)
    return max(-exp - 1, 0)


def minimal_level(network: RoadNetwork) -> int:
    """Smallest admissible refinement level for this network.

    Combines the spacing bracket from the special-point distances with the
    dyadic alignment every gamma needs to land on the base lattice.
    """
    n = level_from_min_gap(min_special_gap(network))
    n = max(n, network.alignment_level())
    if n > MAX_LEVEL:
        raise DegenerateGridError(
            f"special points nearly coincide; required level {n} exceeds {MAX_LEVEL}"
        )
    return n


class RegionGrid:
    """Sorted node array of one region plus exact lookup structures."""

    def __init__(self, gamma: float, v_b: float, nodes: list[GridNode]):
        self.gamma = gamma
        self.v_b = v_b
        self.nodes = nodes
        self.zs = [nd.z for nd in nodes]
        self.rhos = [nd.rho for nd in nodes]
        self._by_level: dict[tuple[float, int], int] = {}
        for i, nd in enumerate(nodes):
            self._by_level[(nd.level, nd.side)] = i
        self.apex = 0.25 * gamma

    def __len__(self) -> int:
        return len(self.nodes)

    def find_level(self, level: float, side: int) -> int | None:
        idx = self._by_level.get((level, side))
        if idx is not None:
            return idx
        if level == self.apex:
            return self._by_level.get((level, 0))
        # Tolerant fallback for sub-ulp drift in independently derived levels.
        z = side * (self.apex - level)
        i = bisect_left(self.zs, z)
        for j in (i - 1, i):
            if 0 <= j < len(self.zs) and abs(self.zs[j] - z) <= 1e-10:
                return j
        return None

    def floor_index(self, rho: float, atol: float = 1e-12) -> int:
        """Largest node index with node density <= rho (+atol)."""
        i = bisect_right(self.rhos, rho + atol) - 1
        return max(i, 0)


@dataclass(frozen=True)
class GridSystem:
    network: RoadNetwork
    n: int
    n_min: int
    delta_hat: float
    delta_lo: float
    delta_hi: float
    regions: tuple[RegionGrid, ...]

    def node(self, ref: Ref) -> GridNode:
        return self.regions[ref.region].nodes[ref.index]

    def rho(self, ref: Ref) -> float:
        return self.regions[ref.region].nodes[ref.index].rho

    def z(self, ref: Ref) -> float:
        return self.regions[ref.region].nodes[ref.index].z

    def level(self, ref: Ref) -> float:
        return self.regions[ref.region].nodes[ref.index].level

    def side(self, ref: Ref) -> int:
        return self.regions[ref.region].nodes[ref.index].side

    def gamma(self, ref: Ref) -> float:
        return self.regions[ref.region].gamma

    def ref_at_level(self, region: int, level: float, side: int) -> Ref:
        idx = self.regions[region].find_level(level, side)
        if idx is None:
            raise InternalConsistencyError(
                f"no grid node at flux level {level!r} (side {side}) in region {region}; "
                "grid closure violated"
            )
        return Ref(region, idx)

    def critical_refs(self, region: int) -> tuple[Ref, Ref, Ref]:
        """(rho_check, rho_hat, rho_star) refs of a region."""
        lv_check, lv_hat, lv_star = critical_levels(self.network, region)
        params = self.network.regions[region]
        crit = fx.critical_densities(params, self.network.alpha)
        out = []
        for lv, rho in ((lv_check, crit.rho_check), (lv_hat, crit.rho_hat), (lv_star, crit.rho_star)):
            side = 1 if rho > 0.5 else (-1 if rho < 0.5 else 0)
            out.append(self.ref_at_level(region, lv, side))
        return tuple(out)

    def potential(self, region: int) -> float:
        """z_hat - z_check of a region (the non-classical jump size in z)."""
        check, hat, _ = self.critical_refs(region)
        return self.z(hat) - self.z(check)

    def floor_ref(self, region: int, rho: float) -> Ref:
        return Ref(region, self.regions[region].floor_index(rho))

    def dump_rows(self):
        """Iterate (region, index, z, rho, tag) over all nodes."""
        for m, rg in enumerate(self.regions):
            for i, nd in enumerate(rg.nodes):
                yield (m, i, nd.z, nd.rho, nd.tag)


def build_grid(network: RoadNetwork, n: int) -> GridSystem:
    """Assemble the level-n grid of every region and run the pruning pass."""
    n_min = minimal_level(network)
    if n < n_min:
        raise ConfigError(f"level below minimal: n={n} < N_min={n_min}")

    hat = 2.0 ** -(n + 2)
    threshold = 2.0 ** -(n_min + 2)
    ks = [_aligned_k(n, r.gamma) for r in network.regions]
    per_region_specials = _region_specials(network)

    # Pruning: nearest base node to each fixed point goes, along with its
    # equal-flux partners and reflections everywhere (anchors are kept).
    removed: set[tuple[int, int]] = set()
    for m, zmap in enumerate(per_region_specials):
        k = ks[m]
        for zbar in zmap:
            j0 = round(zbar / hat)
            j0 = max(-k, min(k, j0))
            if abs(j0 * hat - zbar) >= threshold:
                continue
            if j0 == 0 or abs(j0) == k:
                continue
            lvl = k - abs(j0)
            for mp, kp in enumerate(ks):
                jj = kp - lvl
                if 0 < jj < kp:
                    removed.add((mp, jj))
                    removed.add((mp, -jj))

    regions = []
    for m, region in enumerate(network.regions):
        k = ks[m]
        by_z: dict[float, GridNode] = {}
        for j in range(-k, k + 1):
            if (m, j) in removed:
                continue
            z = j * hat
            level = (k - abs(j)) * hat
            side = (j > 0) - (j < 0)
            by_z[z] = GridNode(z=z, rho=fx.psi_inv(region.gamma, z), level=level, side=side, tag="base")
        for z, sp in per_region_specials[m].items():
            old = by_z.get(z)
            if old is not None and _TAG_PRIORITY[old.tag] >= _TAG_PRIORITY[sp.tag]:
                continue
            side = (z > 0.0) - (z < 0.0)
            by_z[z] = GridNode(z=z, rho=sp.rho, level=sp.level, side=side, tag=sp.tag)

        nodes = [by_z[z] for z in sorted(by_z)]
        _check_gaps(m, nodes, hat)
        regions.append(RegionGrid(region.gamma, region.v_b, nodes))

    return GridSystem(
        network=network,
        n=n,
        n_min=n_min,
        delta_hat=hat,
        delta_lo=0.5 * hat,
        delta_hi=2.0 * hat,
        regions=tuple(regions),
    )


def _check_gaps(m: int, nodes: list[GridNode], hat: float) -> None:
    lo, hi = 0.5 * hat, 2.0 * hat
    eps = 1e-9 * hat
    for a, b in zip(nodes, nodes[1:]):
        gap = b.z - a.z
        if gap < lo - eps or gap > hi - eps:
            raise PruningError(
                f"pruning failed in region {m}: gap {gap!r} outside [{lo!r}, {hi!r}) "
                f"between z={a.z!r} and z={b.z!r}"
            )


class PiecewiseFlux:
    """Piecewise-linear interpolant of the flux through the grid nodes."""

    def __init__(self, grid: GridSystem):
        self.grid = grid

    def __call__(self, region: int, rho: float) -> float:
        rg = self.grid.regions[region]
        if not 0.0 <= rho <= 1.0:
            raise ValueError(f"density must lie in [0, 1], got {rho}")
        i = bisect_right(rg.rhos, rho) - 1
        if i >= len(rg.nodes) - 1:
            return rg.nodes[-1].level
        a, b = rg.nodes[i], rg.nodes[i + 1]
        w = (rho - a.rho) / (b.rho - a.rho)
        return a.level + w * (b.level - a.level)


@dataclass(frozen=True)
class PiecewiseProfile:
    """Piecewise-constant field of grid states: refs[i] holds on [breaks[i-1], breaks[i])."""

    breaks: tuple[float, ...]
    refs: tuple[Ref, ...]

    def __post_init__(self):
        if len(self.refs) != len(self.breaks) + 1:
            raise ValueError("need exactly one more state than breakpoints")

    def ref_at(self, x: float) -> Ref:
        return self.refs[bisect_right(self.breaks, x)]

    def segments(self):
        """Iterate (x_lo, x_hi, ref) including the infinite end pieces."""
        edges = (-math.inf, *self.breaks, math.inf)
        for i, ref in enumerate(self.refs):
            yield edges[i], edges[i + 1], ref


def sample_initial(
    grid: GridSystem,
    rho0_left: float,
    pieces: list[tuple[float, float]],
) -> PiecewiseProfile:
    """Floor a piecewise-constant density onto the grid, region by region.

    ``rho0_left`` holds left of the first breakpoint; each (x, value) pair
    starts a new piece.  Region boundaries are inserted as breakpoints so
    every piece is sampled against a single region's grid; the sampled
    value is the largest grid density not exceeding the input value, hence
    never exceeds it, and resampling a sampled profile is the identity.
    """
    network = grid.network
    piece_breaks = [x for x, _ in pieces]
    if any(x2 <= x1 for x1, x2 in zip(piece_breaks, piece_breaks[1:])):
        raise ConfigError("profile breakpoints must be strictly increasing")
    piece_vals = [v for _, v in pieces]
    for v in [rho0_left, *piece_vals]:
        if not 0.0 <= v <= 1.0:
            raise ConfigError(f"initial density {v} outside [0, 1]")
    xs = sorted(set(piece_breaks) | set(network.boundaries))
    refs = [grid.floor_ref(0, rho0_left)]
    for x in xs:
        i = bisect_right(piece_breaks, x) - 1
        v = piece_vals[i] if i >= 0 else rho0_left
        refs.append(grid.floor_ref(network.region_of(x), v))
    out_breaks, out_refs = [], [refs[0]]
    for x, ref in zip(xs, refs[1:]):
        if ref == out_refs[-1]:
            continue
        out_breaks.append(x)
        out_refs.append(ref)
    return PiecewiseProfile(tuple(out_breaks), tuple(out_refs))

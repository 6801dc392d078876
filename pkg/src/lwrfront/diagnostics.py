"""Functionals of the front field: interaction potential, variation, audits.

The interaction potential (``temple_breakdown``) weighs every moving front
by its z-jump and every standing speed-limit front by |d gamma| (full
weight when z increases across it, half weight when it decreases), plus a
bottleneck term that vanishes exactly when the non-classical pair
(rho_hat, rho_check) flanks the bottleneck and switches to the next
region's value just before a boundary crossing.  Its monotone decay across
events is what bounds the total variation of the approximate solutions.

All integrals here are exact piecewise-constant integrals by breakpoint
merging; no quadrature error enters any asserted bound.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

from . import flux as fx
from .grid import GridSystem, Ref
from .network import RoadNetwork


@dataclass(frozen=True)
class TempleBreakdown:
    total: float
    front_terms: tuple[float, ...]
    varpi: float
    varpi_branch: str  # "pair" | "apart" | "near_boundary"


def temple_breakdown(
    grid: GridSystem,
    fronts,
    y: float,
    ydot: float,
    flanks: tuple[Ref, Ref],
) -> TempleBreakdown:
    """Potential of a front family plus the bottleneck correction term.

    ``fronts`` is any iterable with ``kind``, ``left`` and ``right``
    attributes.  The boundary-switching window of the correction term is
    taken in its vanishing limit, realized as the collision tolerance: the
    instant the bottleneck touches a boundary (possibly one rounding unit
    short of it) the term charges the downstream region's potential.  A
    window tied to the current speed would not be monotone: an event that
    slows the bottleneck would shrink it and flip the term back up.
    """
    terms = []
    for f in fronts:
        z_l, z_r = grid.z(f.left), grid.z(f.right)
        if f.kind == "gamma_jump":
            dgamma = abs(grid.gamma(f.right) - grid.gamma(f.left))
            terms.append(dgamma if z_l < z_r else 0.5 * dgamma)
        else:
            terms.append(abs(z_r - z_l))

    network = grid.network
    m = _region_at(network, y)
    tol = 1e-12 * max(1.0, abs(y))
    at_boundary = m > 0 and y - network.boundaries[m - 1] <= tol
    check_ref, hat_ref, _ = grid.critical_refs(m)
    if _same_state(grid, flanks[0], hat_ref) and _same_state(grid, flanks[1], check_ref):
        varpi = 0.0
        branch = "pair"
    else:
        varpi = 2.0 * grid.potential(m)
        branch = "near_boundary" if at_boundary else "apart"
    return TempleBreakdown(sum(terms) + varpi, tuple(terms), varpi, branch)


def _same_state(grid: GridSystem, a: Ref, b: Ref) -> bool:
    """State equality by value: same speed limit, flux level and side.

    A degenerate boundary between regions with equal gamma makes the same
    physical density appear under two region indices; (gamma, level, side)
    identifies it exactly without comparing derived densities.
    """
    if a == b:
        return True
    return (
        grid.gamma(a) == grid.gamma(b)
        and grid.level(a) == grid.level(b)
        and grid.side(a) == grid.side(b)
    )


def total_variation(values) -> float:
    values = list(values)
    return sum(abs(b - a) for a, b in zip(values, values[1:]))


def positive_variation(values) -> float:
    values = list(values)
    return sum(max(b - a, 0.0) for a, b in zip(values, values[1:]))


def _piecewise_value(breaks, values, x: float) -> float:
    return values[bisect_right(breaks, x)]


def l1_distance(
    breaks_a, values_a, breaks_b, values_b, window: tuple[float, float]
) -> float:
    """Exact integral of |A - B| over the window (both piecewise constant)."""
    lo, hi = window
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise ValueError(f"window must be a finite interval, got {window}")
    cuts = sorted({lo, hi, *(x for x in breaks_a if lo < x < hi), *(x for x in breaks_b if lo < x < hi)})
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        mid = 0.5 * (a + b)
        total += abs(
            _piecewise_value(breaks_a, values_a, mid) - _piecewise_value(breaks_b, values_b, mid)
        ) * (b - a)
    return total


def constraint_residual(
    grid: GridSystem, y: float, ydot: float, left: Ref, right: Ref
) -> tuple[float, float]:
    """f(gamma, rho(y+-)) - ydot * rho(y+-) - F_alpha, for both traces."""
    network = grid.network
    region = network.regions[_region_at(network, y)]
    cap = fx.f_alpha_capacity(region, network.alpha, ydot)
    res = []
    for ref in (left, right):
        # grouped so the critical pair cancels exactly in floating point
        res.append(grid.level(ref) - (cap + ydot * grid.rho(ref)))
    return res[0], res[1]


def _region_at(network: RoadNetwork, y: float) -> int:
    """Region of the bottleneck, tolerant of boundary contact within rounding."""
    m = network.region_of(y)
    tol = 1e-12 * max(1.0, abs(y))
    if m < len(network.boundaries) and network.boundaries[m] - y <= tol:
        return m + 1
    return m


@dataclass(frozen=True)
class XiReport:
    """Bottleneck speed mapped through the state bijection, per trajectory segment."""

    times: tuple[float, ...]
    values: tuple[float, ...]
    positive_variation: float
    total_variation: float
    sup: float

    def bound_holds(self, tol: float = 1e-12) -> bool:
        return self.total_variation <= 2.0 * self.positive_variation + self.sup + tol


def xi_monitor(trajectory, network: RoadNetwork) -> XiReport:
    """xi(t) = psi(gamma(y), ydot / gamma(y)) along a recorded trajectory."""
    times, values = [], []
    for t, y, ydot in trajectory:
        gamma = network.gamma_of(network.region_of(y))
        times.append(t)
        values.append(fx.psi(gamma, min(ydot / gamma, 1.0)))
    return XiReport(
        times=tuple(times),
        values=tuple(values),
        positive_variation=positive_variation(values),
        total_variation=total_variation(values),
        sup=max((abs(v) for v in values), default=0.0),
    )


# -- conservation audit --------------------------------------------------


def _profile_mass(record, grid: GridSystem, t: float, a: float, b: float) -> float:
    """Integral of rho(t, .) over [a, b] for one frozen inter-event interval.

    Walks the chain order with a forward-only cursor: at the interval's end
    time a colliding pair may have crossed by one rounding unit, and the
    zero-width piece must not disturb the states that follow it.
    """
    total = 0.0
    cursor, prev_ref = a, record.left_state
    for x0, s, ref in record.fronts:
        xc = min(max(x0 + s * (t - record.t0), a), b)
        if xc > cursor:
            total += grid.rho(prev_ref) * (xc - cursor)
            cursor = xc
        prev_ref = ref
    total += grid.rho(prev_ref) * (b - cursor)
    return total


def _boundary_flux(record, grid: GridSystem, x: float) -> float:
    """Time integral of the flux through the line at position x over the interval."""
    t0, t1 = record.t0, record.t1
    cuts = [t0, t1]
    for x0, s, _ in record.fronts:
        if s != 0.0:
            tc = t0 + (x - x0) / s
            if t0 < tc < t1:
                cuts.append(tc)
    cuts.sort()
    total = 0.0
    for ta, tb in zip(cuts, cuts[1:]):
        tm = 0.5 * (ta + tb)
        ref = record.left_state
        for x0, s, right in record.fronts:
            if x0 + s * (tm - t0) <= x:
                ref = right
        total += grid.level(ref) * (tb - ta)
    return total


def mass_audit(intervals, grid: GridSystem, a: float, b: float) -> float:
    """Worst conservation defect per unit time over the recorded history.

    For every inter-event interval compares the change of mass in [a, b]
    with the net flux through the window edges; both are exact integrals.
    The per-interval rate is only meaningful above a duration floor (the
    absolute defect of a micro-interval is pure rounding, and dividing by
    its dt amplifies noise); the accumulated defect over the whole history
    is rated against the total time instead, so nothing escapes the audit.
    """
    worst = 0.0
    accumulated = 0.0
    t_first = t_last = None
    for rec in intervals:
        dt = rec.t1 - rec.t0
        if dt <= 0.0:
            continue
        gained = _profile_mass(rec, grid, rec.t1, a, b) - _profile_mass(rec, grid, rec.t0, a, b)
        net_in = _boundary_flux(rec, grid, a) - _boundary_flux(rec, grid, b)
        defect = abs(gained - net_in)
        accumulated += defect
        t_first = rec.t0 if t_first is None else t_first
        t_last = rec.t1
        if dt >= 1e-6:
            worst = max(worst, defect / dt)
    if t_last is not None and t_last > t_first:
        worst = max(worst, accumulated / (t_last - t_first))
    return worst


def min_distance_margin(snapshot, grid: GridSystem, t: float) -> float:
    """Worst slack in the fan-spreading lower bound at one snapshot.

    For grid states rho_L > rho_R joined only by moving single-region waves
    the spatial separation must be at least 2 gamma t (rho_L - rho_R -
    zeta), zeta being the largest adjacent density gap of the region's
    grid.  Returns min(distance - bound) over admissible pairs (negative
    means a violation).
    """
    worst = math.inf
    refs, breaks = snapshot.refs, snapshot.breaks
    # piece i ends at breaks[i]; piece j starts at breaks[j-1]
    for i in range(len(breaks)):
        for j in range(i + 1, len(breaks) + 1):
            left, right = refs[i], refs[j]
            if left.region != right.region:
                continue
            if any(refs[k].region != left.region for k in range(i, j + 1)):
                continue
            rho_l, rho_r = grid.rho(left), grid.rho(right)
            if rho_l <= rho_r:
                continue
            rg = grid.regions[left.region]
            zeta = max(b - a for a, b in zip(rg.rhos, rg.rhos[1:]))
            # admissible connections only: upward jumps (shocks) or single
            # grid-step downward ones (fan sub-fronts); the non-classical
            # jump spans many grid cells and voids the bound
            if any(
                grid.rho(refs[k]) - grid.rho(refs[k + 1]) > zeta + 1e-12
                for k in range(i, j)
            ):
                continue
            bound = 2.0 * rg.gamma * t * (rho_l - rho_r - zeta)
            distance = breaks[j - 1] - breaks[i]
            worst = min(worst, distance - bound)
    return worst


# -- cross-level convergence ---------------------------------------------


@dataclass(frozen=True)
class LevelResult:
    n: int
    tv_z: float
    tv_z_initial: float
    temple: float
    front_count: int
    sup_z: float


@dataclass(frozen=True)
class ConvergenceReport:
    levels: tuple[int, ...]
    snapshot_distances: tuple[float, ...]  # mean L1 distance to the finest level
    speed_distances: tuple[float, ...]  # L1 distance of ydot series to finest
    per_level: tuple[LevelResult, ...]
    distances_decreasing: bool
    speed_decreasing: bool
    tv_bound: float
    tv_bound_ok: bool

    def to_dict(self) -> dict:
        return {
            "levels": list(self.levels),
            "snapshot_l1_to_finest": list(self.snapshot_distances),
            "ydot_l1_to_finest": list(self.speed_distances),
            "per_level": [vars(r) for r in self.per_level],
            "distances_decreasing": self.distances_decreasing,
            "speed_decreasing": self.speed_decreasing,
            "tv_bound": self.tv_bound,
            "tv_bound_ok": self.tv_bound_ok,
        }


def _ydot_l1(traj_a, traj_b, t_end: float) -> float:
    cuts = sorted({0.0, t_end, *(r[0] for r in traj_a), *(r[0] for r in traj_b)})
    ta, sa = [r[0] for r in traj_a], [r[2] for r in traj_a]
    tb, sb = [r[0] for r in traj_b], [r[2] for r in traj_b]
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        if b <= 0.0 or a >= t_end:
            continue
        mid = 0.5 * (a + b)
        va = sa[max(bisect_right(ta, mid) - 1, 0)]
        vb = sb[max(bisect_right(tb, mid) - 1, 0)]
        total += abs(va - vb) * (b - a)
    return total


def convergence_study(cfg, levels) -> ConvergenceReport:
    """Run the same scenario at several refinement levels and compare to the finest."""
    from . import simulator
    from .grid import build_grid, sample_initial

    levels = sorted(set(levels))
    if len(levels) < 2:
        raise ValueError("need at least two levels to compare")
    t_end = cfg.t_end
    snap_times = list(cfg.snapshot_times) or [t_end]

    results = {}
    for n in levels:
        grid = build_grid(cfg.network, n)
        profile = sample_initial(grid, cfg.rho_left, list(cfg.pieces))
        state = simulator.init(cfg.network, grid, profile, cfg.y0, front_cap=cfg.front_cap)
        state, rows, snaps = simulator.run(state, t_end, snap_times)
        results[n] = (grid, state, rows, snaps)

    extent = [cfg.y0, *(x for x, _ in cfg.pieces), *cfg.network.boundaries]
    margin = cfg.network.max_gamma() * t_end + 1.0
    window = (min(extent) - margin, max(extent) + margin)

    finest = levels[-1]
    grid_f, state_f, _, snaps_f = results[finest]
    snap_dist, speed_dist, per_level = [], [], []
    for n in levels:
        grid_n, state_n, rows_n, snaps_n = results[n]
        dists = []
        for sa, sb in zip(snaps_n, snaps_f):
            dists.append(
                l1_distance(
                    sa.breaks, [grid_n.rho(r) for r in sa.refs],
                    sb.breaks, [grid_f.rho(r) for r in sb.refs],
                    window,
                )
            )
        snap_dist.append(sum(dists) / len(dists))
        speed_dist.append(_ydot_l1(state_n.trajectory, state_f.trajectory, t_end))
        last = rows_n[-1]
        per_level.append(
            LevelResult(
                n=n,
                tv_z=last["tv_z"],
                tv_z_initial=rows_n[0]["tv_z"],
                temple=last["temple"],
                front_count=last["front_count"],
                sup_z=max(
                    (abs(grid_n.z(r)) for s in snaps_n for r in s.refs), default=0.0
                ),
            )
        )

    # The decay chain bounds TV(z(t)) by the potential of the *sampled*
    # initial datum, so the bound uses each level's own initial variation.
    c_pot = 2.0 * max(_exact_potential(cfg.network, m) for m in range(cfg.network.num_regions))
    tv_ok = all(
        r.tv_z <= r.tv_z_initial + cfg.network.tv_gamma() + c_pot + 1e-9 for r in per_level
    )
    tv_bound = _tv_bound(cfg)
    strict_parts = snap_dist[:-1]
    speed_parts = speed_dist[:-1]
    return ConvergenceReport(
        levels=tuple(levels),
        snapshot_distances=tuple(snap_dist),
        speed_distances=tuple(speed_dist),
        per_level=tuple(per_level),
        distances_decreasing=all(a > b for a, b in zip(strict_parts, strict_parts[1:])),
        speed_decreasing=all(a >= b for a, b in zip(speed_parts, speed_parts[1:])),
        tv_bound=tv_bound,
        tv_bound_ok=tv_ok,
    )


def tv_z_initial_exact(cfg) -> float:
    """Total variation of the exact initial data in z, boundary jumps included."""
    network = cfg.network
    xs = sorted({x for x, _ in cfg.pieces} | set(network.boundaries))
    piece_breaks = [x for x, _ in cfg.pieces]
    piece_vals = [v for _, v in cfg.pieces]
    zs = [fx.psi(network.gamma_of(0), cfg.rho_left)]
    for x in xs:
        i = bisect_right(piece_breaks, x) - 1
        v = piece_vals[i] if i >= 0 else cfg.rho_left
        zs.append(fx.psi(network.gamma_of(network.region_of(x)), v))
    return total_variation(zs)


def _tv_bound(cfg) -> float:
    network = cfg.network
    c_pot = 2.0 * max(
        _exact_potential(network, m) for m in range(network.num_regions)
    )
    return tv_z_initial_exact(cfg) + network.tv_gamma() + c_pot


def _exact_potential(network: RoadNetwork, m: int) -> float:
    region = network.regions[m]
    crit = fx.critical_densities(region, network.alpha)
    return fx.psi(region.gamma, crit.rho_hat) - fx.psi(region.gamma, crit.rho_check)


def lipschitz_constant(cfg) -> float:
    """Time-Lipschitz constant for the L1 modulus of the z-field."""
    network = cfg.network
    c_pot = 2.0 * max(_exact_potential(network, m) for m in range(network.num_regions))
    return network.max_gamma() * (
        tv_z_initial_exact(cfg) + 2.0 * network.tv_gamma() + c_pot
    )

"""Exact Riemann solvers on grid states.

Within one region the concave flux gives the textbook solution: a single
shock for increasing data, a fan of sub-fronts stepping through adjacent
grid states for decreasing data.  Across a speed-limit jump the trace
states are selected by intersecting the one-sided flux envelopes: with

    D = f(gamma_L, rho_L) if rho_L <= 1/2 else gamma_L / 4   (demand)
    S = f(gamma_R, rho_R) if rho_R >= 1/2 else gamma_R / 4   (supply)

the crossing level is f_x = min(D, S) and each trace is the grid state at
level f_x nearest its datum (zero jump when the datum itself sits at f_x).
Both traces always end up on the same side of rho = 1/2, which is what
makes the standing jump a slope +-1/4 segment in (z, gamma) space.

The constrained solver first evaluates the unconstrained solution on the
ray x/t = v_b.  If the capacity cap is exceeded there, the solution is
rebuilt from the modified data (rho_L, rho_hat) left of the ray and
(rho_check, rho_R) right of it, glued by the non-classical discontinuity
(rho_hat -> rho_check) that rides the ray exactly; otherwise the classical
solution stands and only the bottleneck speed is reported (its maximal
speed when the traffic is faster, the traffic speed otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import flux as fx
from .errors import InternalConsistencyError
from .grid import GridSystem, Ref

SPEED_TOL = 1e-11
TIE_TOL = 1e-12

WAVE_KINDS = ("shock", "rarefaction_fan", "gamma_jump", "non_classical")


@dataclass(frozen=True)
class Wave:
    left: Ref
    right: Ref
    kind: str
    speed: float


@dataclass(frozen=True)
class WaveSequence:
    """Ordered waves of one self-similar solution, plus the leftmost state."""

    left_state: Ref
    waves: tuple[Wave, ...] = field(default_factory=tuple)

    @property
    def right_state(self) -> Ref:
        return self.waves[-1].right if self.waves else self.left_state

    def state_at(self, xi: float) -> Ref:
        """State on the ray x/t = xi; a wave at exactly xi yields its right state."""
        state = self.left_state
        for w in self.waves:
            if w.speed <= xi + TIE_TOL:
                state = w.right
            else:
                break
        return state


@dataclass(frozen=True)
class RiemannInput:
    """Datum of a single solve: two grid states and the constraint switch.

    The constrained case always uses the right state's region for the
    bottleneck cap and its critical pair; that is the region the
    bottleneck moves into (it never moves left).
    """

    rho_l: Ref
    rho_r: Ref
    constrained: bool = False


@dataclass(frozen=True)
class ConstrainedSolution:
    sequence: WaveSequence
    bottleneck_speed: float
    case: int


def _z_waves(grid: GridSystem, a: Ref, b: Ref) -> list[Wave]:
    """Waves connecting left state a to right state b within one region."""
    if a.region != b.region:
        raise InternalConsistencyError("z-waves must stay within one region")
    if a.index == b.index:
        return []
    m = a.region
    gamma = grid.regions[m].gamma
    rho_a, rho_b = grid.rho(a), grid.rho(b)
    if rho_a < rho_b:
        return [Wave(a, b, "shock", fx.shock_speed(gamma, rho_a, rho_b))]
    waves = []
    for i in range(a.index, b.index, -1):
        lo, hi = Ref(m, i), Ref(m, i - 1)
        waves.append(
            Wave(lo, hi, "rarefaction_fan", fx.shock_speed(gamma, grid.rho(lo), grid.rho(hi)))
        )
    return waves


def envelope_cross(grid: GridSystem, left: Ref, right: Ref) -> tuple[Ref, Ref, float]:
    """Trace states and flux level of the standing jump between two regions."""
    if left.region == right.region:
        raise InternalConsistencyError("envelope crossing needs two distinct regions")
    m_l, m_r = left.region, right.region
    side_l, side_r = grid.side(left), grid.side(right)
    lvl_l, lvl_r = grid.level(left), grid.level(right)
    demand = lvl_l if side_l <= 0 else grid.regions[m_l].apex
    supply = lvl_r if side_r >= 0 else grid.regions[m_r].apex
    f_x = min(demand, supply)

    if side_l <= 0 and f_x == lvl_l:
        prime_l = left
    else:
        prime_l = grid.ref_at_level(m_l, f_x, 1)
    if side_r >= 0 and f_x == lvl_r:
        prime_r = right
    else:
        prime_r = grid.ref_at_level(m_r, f_x, -1)

    if grid.side(prime_l) < 0 and grid.side(prime_r) > 0:
        # Knife-edge data: equal flux on opposite branches.  Both one-sided
        # jumps are zero, but the standing jump must keep its traces on one
        # side of 1/2, so pick the same-side pair with the smaller total jump.
        alt_r = grid.ref_at_level(m_r, f_x, -1)
        alt_l = grid.ref_at_level(m_l, f_x, 1)
        jump_a = abs(grid.rho(right) - grid.rho(alt_r))
        jump_b = abs(grid.rho(left) - grid.rho(alt_l))
        if jump_a <= jump_b:
            prime_r = alt_r
        else:
            prime_l = alt_l
    return prime_l, prime_r, f_x


def solve_classical(grid: GridSystem, left: Ref, right: Ref) -> WaveSequence:
    """Unconstrained solution between two grid states (one or two regions)."""
    if left.region == right.region:
        waves = _z_waves(grid, left, right)
        return WaveSequence(left, tuple(waves))
    if abs(left.region - right.region) != 1:
        raise InternalConsistencyError("Riemann data must span at most one boundary")
    prime_l, prime_r, f_x = envelope_cross(grid, left, right)
    left_group = _z_waves(grid, left, prime_l)
    right_group = _z_waves(grid, prime_r, right)
    for w in left_group:
        if w.speed > SPEED_TOL:
            raise InternalConsistencyError(f"left-of-jump wave with positive speed {w.speed}")
    for w in right_group:
        if w.speed < -SPEED_TOL:
            raise InternalConsistencyError(f"right-of-jump wave with negative speed {w.speed}")
    waves = [*left_group, Wave(prime_l, prime_r, "gamma_jump", 0.0), *right_group]
    return WaveSequence(left, tuple(waves))


def solve_constrained(grid: GridSystem, left: Ref, right: Ref) -> ConstrainedSolution:
    """Solution honoring the bottleneck capacity, plus the bottleneck speed.

    The bottleneck sits at the datum point and moves right; the cap and its
    critical states are those of the right state's region.
    """
    m_r = right.region
    region = grid.network.regions[m_r]
    v_b, alpha = region.v_b, grid.network.alpha
    classical = solve_classical(grid, left, right)
    u = classical.state_at(v_b)
    lhs = grid.level(u)
    line = fx.f_alpha_capacity(region, alpha, v_b) + v_b * grid.rho(u)

    if lhs > line:
        check_ref, hat_ref, _ = grid.critical_refs(m_r)
        ahead = solve_classical(grid, left, hat_ref)
        behind = solve_classical(grid, check_ref, right)
        for w in ahead.waves:
            if w.speed > v_b + SPEED_TOL:
                raise InternalConsistencyError(
                    f"wave at speed {w.speed} ahead of the bottleneck ray {v_b}"
                )
        for w in behind.waves:
            if w.speed < v_b - SPEED_TOL:
                raise InternalConsistencyError(
                    f"wave at speed {w.speed} behind the bottleneck ray {v_b}"
                )
        waves = (*ahead.waves, Wave(hat_ref, check_ref, "non_classical", v_b), *behind.waves)
        seq = WaveSequence(left, waves)
        _check_constraint(grid, seq, m_r, v_b, alpha)
        return ConstrainedSolution(seq, v_b, 1)

    if lhs < v_b * grid.rho(u):
        return ConstrainedSolution(classical, fx.velocity(region.gamma, grid.rho(right)), 3)
    return ConstrainedSolution(classical, v_b, 2)


def _check_constraint(grid, seq, m_r, v_b, alpha) -> None:
    u = seq.state_at(v_b)
    region = grid.network.regions[m_r]
    residual = grid.level(u) - v_b * grid.rho(u) - fx.f_alpha_capacity(region, alpha, v_b)
    if residual > 1e-10:
        raise InternalConsistencyError(
            f"constrained solution violates the capacity cap by {residual}"
        )


def solve(grid: GridSystem, datum: RiemannInput) -> ConstrainedSolution:
    """Dispatch a RiemannInput; classical solves report the free-flow speed."""
    if datum.constrained:
        return solve_constrained(grid, datum.rho_l, datum.rho_r)
    seq = solve_classical(grid, datum.rho_l, datum.rho_r)
    region = grid.network.regions[datum.rho_r.region]
    speed = min(region.v_b, fx.velocity(region.gamma, grid.rho(seq.state_at(region.v_b))))
    return ConstrainedSolution(seq, speed, 0)


def check_speed_order(seq: WaveSequence) -> None:
    speeds = [w.speed for w in seq.waves]
    for a, b in zip(speeds, speeds[1:]):
        if b < a - SPEED_TOL:
            raise InternalConsistencyError(f"wave speeds out of order: {speeds}")

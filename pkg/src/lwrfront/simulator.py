"""Event-driven evolution of the piecewise-constant front field.

Between events every discontinuity moves on a straight line, so the next
event is the earliest pairwise intersection among position-adjacent
trajectories; the bottleneck participates as a virtual front.  An event is
resolved by removing everything co-located at the collision point and
solving one local Riemann problem with the outermost states, constrained
whenever the bottleneck is among the participants.  Standing speed-limit
fronts live at the region boundaries permanently, so a moving front can
never change region, and the bottleneck can never cross a boundary,
without triggering an event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from . import diagnostics as diag
from . import flux as fx
from . import riemann
from .errors import FrontExplosionError, InternalConsistencyError, InvariantViolationError
from .grid import GridSystem, PiecewiseProfile, Ref
from .network import RoadNetwork

DEFAULT_FRONT_CAP = 10**6
CASCADE_LIMIT = 32


@dataclass
class Front:
    id: int
    kind: str
    x0: float
    t0: float
    speed: float
    left: Ref
    right: Ref
    birth_time: float

    def pos(self, t: float) -> float:
        return self.x0 + self.speed * (t - self.t0)


@dataclass
class Bottleneck:
    y0: float
    t0: float
    speed: float

    def pos(self, t: float) -> float:
        return self.y0 + self.speed * (t - self.t0)


@dataclass(frozen=True)
class EventRecord:
    time: float
    position: float
    kind: str
    fronts_in: tuple[int, ...]
    fronts_out: tuple[int, ...]
    temple_before: float
    temple_after: float


@dataclass(frozen=True)
class FrontRecord:
    id: int
    kind: str
    birth_time: float
    birth_x: float
    speed: float
    death_time: float
    left: Ref
    right: Ref


@dataclass(frozen=True)
class IntervalRecord:
    """Frozen front field on [t0, t1); enough to evaluate rho(t, x) exactly."""

    t0: float
    t1: float
    left_state: Ref
    fronts: tuple[tuple[float, float, Ref], ...]  # (x at t0, speed, right state)


@dataclass(frozen=True)
class Snapshot:
    time: float
    breaks: tuple[float, ...]
    refs: tuple[Ref, ...]


@dataclass
class Tolerances:
    collision: float = 1e-12
    constraint: float = 1e-8
    temple: float = 1e-10


@dataclass
class SimState:
    grid: GridSystem
    network: RoadNetwork
    time: float
    fronts: list[Front]
    bottleneck: Bottleneck
    left_end: Ref
    tol: Tolerances = field(default_factory=Tolerances)
    front_cap: int = DEFAULT_FRONT_CAP
    events: list[EventRecord] = field(default_factory=list)
    trajectory: list[tuple[float, float, float]] = field(default_factory=list)
    intervals: list[IntervalRecord] = field(default_factory=list)
    front_log: dict[int, FrontRecord] = field(default_factory=dict)
    _next_id: int = 0

    def new_id(self) -> int:
        self._next_id += 1
        return self._next_id

    # -- profile access ------------------------------------------------
    #
    # ``fronts`` is kept in chain order: the right state of each front is
    # the left state of the next.  Between events positions are
    # non-decreasing along the chain (a crossing would be an event), so
    # chain order doubles as spatial order.

    def state_right_of(self, x: float, t: float | None = None) -> Ref:
        t = self.time if t is None else t
        tol = _pos_tol(x, self.tol.collision)
        state = self.left_end
        for f in self.fronts:
            if f.pos(t) <= x + tol:
                state = f.right
            else:
                break
        return state

    def state_left_of(self, x: float, t: float | None = None) -> Ref:
        t = self.time if t is None else t
        tol = _pos_tol(x, self.tol.collision)
        state = self.left_end
        for f in self.fronts:
            if f.pos(t) < x - tol:
                state = f.right
            else:
                break
        return state

    def snapshot(self, t: float) -> Snapshot:
        """Profile at time t with zero-width pieces merged away."""
        breaks, refs = [], [self.left_end]
        for f in self.fronts:
            x = f.pos(t)
            if breaks and x - breaks[-1] <= _pos_tol(x, self.tol.collision):
                refs[-1] = f.right
                continue
            breaks.append(x)
            refs.append(f.right)
        # Drop no-op pieces left over from merging.
        out_b, out_r = [], [refs[0]]
        for x, r in zip(breaks, refs[1:]):
            if r == out_r[-1]:
                continue
            out_b.append(x)
            out_r.append(r)
        return Snapshot(t, tuple(out_b), tuple(out_r))

    def flanks(self, t: float | None = None, converging: bool = False) -> tuple[Ref, Ref]:
        """States flanking the bottleneck line in the self-similar sense.

        Fronts co-located with the bottleneck are assigned a side by their
        speed relative to ydot: when fronts diverge (just after an event,
        the default) slower fronts fall behind the bottleneck; when they
        converge (just before an event) the faster ones arrive from the
        left.  A co-moving front (the non-classical one) contributes its
        own two states.
        """
        t = self.time if t is None else t
        bn = self.bottleneck
        return _flank_states(
            self.fronts, self.left_end, bn.pos(t), bn.speed, t,
            self.tol.collision, converging,
        )

    def temple(self, t: float | None = None) -> diag.TempleBreakdown:
        t = self.time if t is None else t
        return diag.temple_breakdown(
            self.grid,
            self.fronts,
            self.bottleneck.pos(t),
            self.bottleneck.speed,
            self.flanks(t),
        )


def _pos_tol(x: float, base: float) -> float:
    return base * max(1.0, abs(x))


def _flank_states(fronts, left_end, y, ydot, t, tol_base, converging):
    tol = _pos_tol(y, tol_base)
    left = right = left_end
    for f in fronts:
        p = f.pos(t)
        if p < y - tol:
            left = right = f.right
            continue
        if p > y + tol:
            break
        ds = f.speed - ydot
        on_left = ds > riemann.SPEED_TOL if converging else ds < -riemann.SPEED_TOL
        if on_left:
            left = right = f.right
        elif abs(ds) <= riemann.SPEED_TOL:
            if f.kind == "non_classical":
                # the co-moving non-classical front *is* the bottleneck
                # interface; a standing speed-limit jump co-located with a
                # stalled bottleneck must not mask its trace states
                left = f.left
            right = f.right
    return left, right


# -- construction -------------------------------------------------------


def init(
    network: RoadNetwork,
    grid: GridSystem,
    profile: PiecewiseProfile,
    y0: float,
    tol: Tolerances | None = None,
    front_cap: int = DEFAULT_FRONT_CAP,
) -> SimState:
    """Solve the t=0 Riemann problems and assemble the initial front field."""
    state = SimState(
        grid=grid,
        network=network,
        time=0.0,
        fronts=[],
        bottleneck=Bottleneck(y0, 0.0, 0.0),
        left_end=profile.refs[0],
        tol=tol or Tolerances(),
        front_cap=front_cap,
    )
    positions = sorted(set(profile.breaks) | {y0})
    ydot = None
    for x in positions:
        i = 0
        for b in profile.breaks:
            if b <= x:
                i += 1
        left = profile.refs[max(i - 1, 0)] if x in profile.breaks else profile.ref_at(x)
        right = profile.refs[i] if x in profile.breaks else profile.ref_at(x)
        if x == y0:
            sol = riemann.solve_constrained(grid, left, right)
            waves = sol.sequence.waves
            ydot = sol.bottleneck_speed
        else:
            if left == right:
                continue
            waves = riemann.solve_classical(grid, left, right).waves
        for w in waves:  # positions ascend and waves are chain-ordered
            _insert_front(state, w, x, 0.0)
    if ydot is None:
        raise InternalConsistencyError("bottleneck initialization did not run")
    state.bottleneck = Bottleneck(y0, 0.0, ydot)
    state.trajectory.append((0.0, y0, ydot))
    _check_chain(state)
    total = state.temple(0.0).total
    state.events.append(
        EventRecord(
            time=0.0,
            position=y0,
            kind="initial",
            fronts_in=(),
            fronts_out=tuple(f.id for f in state.fronts),
            temple_before=total,
            temple_after=total,
        )
    )
    return state


def _make_front(state: SimState, wave: riemann.Wave, x: float, t: float) -> Front:
    f = Front(
        id=state.new_id(),
        kind=wave.kind,
        x0=x,
        t0=t,
        speed=wave.speed,
        left=wave.left,
        right=wave.right,
        birth_time=t,
    )
    state.front_log[f.id] = FrontRecord(
        f.id, f.kind, t, x, f.speed, math.nan, f.left, f.right
    )
    return f


def _insert_front(state: SimState, wave: riemann.Wave, x: float, t: float) -> Front:
    f = _make_front(state, wave, x, t)
    state.fronts.append(f)
    return f


def _check_chain(state: SimState) -> None:
    prev = state.left_end
    for f in state.fronts:
        if f.left != prev:
            raise InternalConsistencyError(
                f"front chain broken at front {f.id}: left {f.left} != previous right {prev}"
            )
        prev = f.right


# -- event detection ----------------------------------------------------


def next_event(state: SimState, t_end: float) -> tuple[float, float] | None:
    """Earliest collision (time, position) strictly after now, or None.

    Scans chain-adjacent front pairs (the first crossing overall is always
    between spatial neighbors) and, separately, the bottleneck line against
    every front: the bottleneck is not part of the chain, and a crossing
    matters even when the constraint stays slack because the bottleneck
    speed law re-evaluates against the new right state.
    """
    t = state.time
    candidates: list[tuple[float, float]] = []
    fronts = state.fronts
    for fa, fb in zip(fronts, fronts[1:]):
        rel = fa.speed - fb.speed
        if rel <= 1e-15:
            continue
        dt = max(fb.pos(t) - fa.pos(t), 0.0) / rel
        candidates.append((t + dt, fa.pos(t) + fa.speed * dt))
    bn = state.bottleneck
    y = bn.pos(t)
    for f in fronts:
        dx = f.pos(t) - y
        rel = bn.speed - f.speed
        if abs(dx) <= _pos_tol(y, state.tol.collision) or rel == 0.0:
            continue
        dt = dx / rel
        if dt <= 0.0:
            continue
        candidates.append((t + dt, y + bn.speed * dt))

    best: tuple[float, float] | None = None
    for t_hit, x_hit in candidates:
        if t_hit > t_end:
            continue
        if best is None or t_hit < best[0] - _time_tol(best[0], state) or (
            abs(t_hit - best[0]) <= _time_tol(best[0], state) and x_hit < best[1]
        ):
            best = (t_hit, x_hit)
    return best


def _time_tol(t: float, state: SimState) -> float:
    return state.tol.collision * max(1.0, abs(t))


# -- event resolution ---------------------------------------------------


def resolve_event(state: SimState, t_star: float, x_star: float) -> EventRecord:
    grid = state.grid
    tol = _pos_tol(x_star, state.tol.collision)
    fronts = state.fronts
    idxs = [i for i, f in enumerate(fronts) if abs(f.pos(t_star) - x_star) <= tol]
    if not idxs:
        raise InternalConsistencyError(f"no fronts at event point ({t_star}, {x_star})")
    if idxs != list(range(idxs[0], idxs[-1] + 1)):
        raise InternalConsistencyError("participants not contiguous in the front chain")
    participating = fronts[idxs[0] : idxs[-1] + 1]
    for f in participating:
        if f.kind == "gamma_jump":
            # collision coordinates are derived arithmetically and can land a
            # rounding unit off the boundary; re-plant everything (including
            # the bottleneck) on the standing front's exact position so the
            # region lookup stays unambiguous forever after
            x_star = f.x0
            break

    bn = state.bottleneck
    bn_here = abs(bn.pos(t_star) - x_star) <= tol

    temple_before = diag.temple_breakdown(
        grid, fronts, bn.pos(t_star), bn.speed,
        _flank_states(fronts, state.left_end, bn.pos(t_star), bn.speed,
                      t_star, state.tol.collision, converging=True),
    ).total

    outer_left = participating[0].left
    outer_right = participating[-1].right
    if abs(outer_left.region - outer_right.region) > 1:
        raise InternalConsistencyError("event spans more than one boundary")

    if bn_here:
        sol = riemann.solve_constrained(grid, outer_left, outer_right)
        waves, new_ydot = sol.sequence.waves, sol.bottleneck_speed
    else:
        waves = riemann.solve_classical(grid, outer_left, outer_right).waves
        new_ydot = bn.speed

    ids_in = tuple(f.id for f in participating)
    for f in participating:
        state.front_log[f.id] = replace(state.front_log[f.id], death_time=t_star)
    new_fronts = [_make_front(state, w, x_star, t_star) for w in waves]
    state.fronts[idxs[0] : idxs[-1] + 1] = new_fronts

    state.time = t_star
    if bn_here:
        state.bottleneck = Bottleneck(x_star, t_star, new_ydot)
    state.trajectory.append((t_star, state.bottleneck.pos(t_star), state.bottleneck.speed))

    kind = _classify(participating, bn_here)
    temple_after = state.temple().total
    record = EventRecord(
        time=t_star,
        position=x_star,
        kind=kind,
        fronts_in=ids_in,
        fronts_out=tuple(f.id for f in new_fronts),
        temple_before=temple_before,
        temple_after=temple_after,
    )
    state.events.append(record)
    _check_chain(state)
    return record


def _classify(participants: list[Front], bn_here: bool) -> str:
    has_gamma = any(f.kind == "gamma_jump" for f in participants)
    has_nc = any(f.kind == "non_classical" for f in participants)
    if bn_here and has_gamma:
        return "bottleneck-gamma" if has_nc else "bottleneck-boundary"
    if bn_here:
        return "z-bottleneck"
    if has_gamma:
        return "z-gamma"
    return "z-z"


# -- time evolution -----------------------------------------------------


def run(
    state: SimState,
    t_end: float,
    snapshot_times: list[float] | None = None,
) -> tuple[SimState, list[dict], list[Snapshot]]:
    """Drive the event loop to t_end, recording diagnostics and snapshots."""
    if t_end <= state.time:
        raise ValueError("t_end must exceed the current time")
    pending = sorted(t for t in (snapshot_times or []) if state.time <= t <= t_end)
    snapshots: list[Snapshot] = []
    rows: list[dict] = []
    if len(state.fronts) > state.front_cap:
        raise FrontExplosionError(
            f"front count {len(state.fronts)} exceeded cap {state.front_cap}"
        )
    rows.append(_diag_row(state))
    cascade = 0
    last_point: tuple[float, float] | None = None

    while True:
        ev = next_event(state, t_end)
        horizon = ev is None
        t_next = t_end if horizon else ev[0]
        while pending and pending[0] <= t_next + _time_tol(t_next, state):
            snapshots.append(state.snapshot(pending.pop(0)))
        if horizon:
            state.intervals.append(_freeze_interval(state, t_end))
            state.time = t_end
            state.trajectory.append((t_end, state.bottleneck.pos(t_end), state.bottleneck.speed))
            rows.append(_diag_row(state))
            break
        t_star, x_star = ev
        if last_point and abs(t_star - last_point[0]) <= _time_tol(t_star, state) and abs(
            x_star - last_point[1]
        ) <= _pos_tol(x_star, state.tol.collision):
            cascade += 1
            if cascade > CASCADE_LIMIT:
                raise InternalConsistencyError(
                    f"event cascade at t={t_star}, x={x_star}: tolerance misconfiguration"
                )
        else:
            cascade = 0
        last_point = (t_star, x_star)

        state.intervals.append(_freeze_interval(state, t_star))
        record = resolve_event(state, t_star, x_star)
        if record.temple_after > record.temple_before + state.tol.temple:
            raise InvariantViolationError(
                f"Temple functional increased at t={t_star}: "
                f"{record.temple_before} -> {record.temple_after}"
            )
        if len(state.fronts) > state.front_cap:
            raise FrontExplosionError(
                f"front count {len(state.fronts)} exceeded cap {state.front_cap}"
            )
        rows.append(_diag_row(state))
    return state, rows, snapshots


def _freeze_interval(state: SimState, t1: float) -> IntervalRecord:
    t0 = state.time
    return IntervalRecord(
        t0=t0,
        t1=t1,
        left_state=state.left_end,
        fronts=tuple((f.pos(t0), f.speed, f.right) for f in state.fronts),
    )


def _diag_row(state: SimState) -> dict:
    grid = state.grid
    t = state.time
    bn = state.bottleneck
    y = bn.pos(t)
    left, right = state.flanks(t)
    res_l, res_r = diag.constraint_residual(grid, y, bn.speed, left, right)
    snap = state.snapshot(t)
    breakdown = state.temple(t)
    m = diag._region_at(state.network, y)
    gamma_y = state.network.gamma_of(m)
    return {
        "t": t,
        "temple": breakdown.total,
        "tv_z": diag.total_variation([grid.z(r) for r in snap.refs]),
        "front_count": len(state.fronts),
        "residual_left": res_l,
        "residual_right": res_r,
        "xi": fx.psi(gamma_y, min(bn.speed / gamma_y, 1.0)),
        "varpi": breakdown.varpi,
        "y": y,
        "ydot": bn.speed,
        "rho_right": grid.rho(right),
    }


def bottleneck_trajectory(state: SimState) -> list[tuple[float, float, float]]:
    """Recorded (t, y, ydot) rows; y is continuous and piecewise linear."""
    return list(state.trajectory)

"""End-to-end acceptance suite: every quantitative bound, one criterion per test.

Each test prints one CRITERION line; run with `pytest -s tests/test_acceptance.py`
to see them.  The randomized battery (criteria 5-9 and 11) is produced once
per session and shared.
"""

import random
import time

import pytest

from lwrfront import diagnostics as diag
from lwrfront import simulator
from lwrfront.flux import (
    RegionParams,
    critical_densities,
    f_alpha_capacity,
    flux,
    psi,
    psi_inv,
    velocity,
)
from lwrfront.grid import Ref, build_grid, minimal_level, sample_initial
from lwrfront.network import RoadNetwork
from lwrfront.riemann import envelope_cross, solve_constrained

from oracles import critical_densities_bisect, min_jump_traces
from scenarios import make_config, random_run

N_RANDOM_RUNS = 1000


def report(num, text):
    print(f"\n[PASS] criterion {num}: {text}")


# -- shared randomized battery -------------------------------------------------


@pytest.fixture(scope="module")
def battery():
    runs = []
    started = time.perf_counter()
    for seed in range(N_RANDOM_RUNS):
        runs.append(random_run(seed))
    elapsed = time.perf_counter() - started
    return runs, elapsed


def test_criterion_01_homeomorphism_round_trip():
    started = time.perf_counter()
    rng = random.Random(1)
    for _ in range(10_000):
        gamma = rng.choice([0.5, 0.75, 1.0, 1.25, 1.5, 2.0])
        rho = rng.random()
        z = psi(gamma, rho)
        assert abs(z) <= 0.25 * gamma + 1e-15
        assert abs(psi_inv(gamma, z) - rho) <= 1e-12
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    report(1, f"psi round trip over 10^4 samples, sup bound held ({elapsed:.2f}s)")


def test_criterion_02_critical_densities():
    started = time.perf_counter()
    count = 0
    for gamma in (0.5, 0.75, 1.0, 1.5, 2.0):
        for vb_frac in (0.0, 0.2, 0.4, 0.6):
            for alpha in (0.15, 0.35, 0.55, 0.75, 0.95):
                region = RegionParams(gamma, vb_frac * gamma)
                c = critical_densities(region, alpha)
                cap = f_alpha_capacity(region, alpha, region.v_b)
                for rho in (c.rho_check, c.rho_hat):
                    assert abs(flux(gamma, rho) - (cap + region.v_b * rho)) <= 1e-12
                lo, hi = critical_densities_bisect(region, alpha)
                assert abs(c.rho_check - lo) <= 1e-10
                assert abs(c.rho_hat - hi) <= 1e-10
                count += 1
    elapsed = time.perf_counter() - started
    assert count == 100 and elapsed < 1.0
    report(2, f"cap-line intersection + bisection agreement on {count} points ({elapsed:.2f}s)")


SWEEP_NETWORKS = [
    RoadNetwork((), (RegionParams(1.0, 0.0),), 0.75),
    RoadNetwork((), (RegionParams(2.0, 1.0),), 0.75),
    RoadNetwork((0.0,), (RegionParams(1.0, 0.0), RegionParams(2.0, 1.0)), 0.75),
    RoadNetwork((0.0,), (RegionParams(2.0, 1.0), RegionParams(1.0, 0.0)), 0.75),
    RoadNetwork(
        (0.0, 1.0),
        (RegionParams(1.0, 0.0), RegionParams(2.0, 1.0), RegionParams(1.0, 0.0)),
        0.75,
    ),
]


def test_criterion_03_riemann_oracle_equivalence():
    started = time.perf_counter()
    pairs = 0
    for net in SWEEP_NETWORKS:
        n = minimal_level(net)
        assert n <= 3
        g = build_grid(net, 3)
        for m in range(net.num_regions - 1):
            left_g, right_g = g.regions[m], g.regions[m + 1]
            for ia in range(len(left_g)):
                for ib in range(len(right_g)):
                    left, right = Ref(m, ia), Ref(m + 1, ib)
                    pl, pr, fx_level = envelope_cross(g, left, right)
                    ol, orr = min_jump_traces(g, left, right)
                    assert (pl, pr) == (ol, orr)
                    slope = (g.z(pr) - g.z(pl)) / (g.gamma(pr) - g.gamma(pl))
                    assert abs(abs(slope) - 0.25) <= 1e-12
                    assert g.side(pl) * g.side(pr) >= 0
                    pairs += 1
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0
    report(3, f"envelope solver == brute-force minimum jump on {pairs} grid pairs ({elapsed:.1f}s)")


def test_criterion_04_constrained_solver_sweep():
    started = time.perf_counter()
    solves = 0
    for net in SWEEP_NETWORKS:
        g = build_grid(net, 3)
        for m_l in range(net.num_regions):
            for m_r in (m_l, m_l + 1):
                if m_r >= net.num_regions:
                    continue
                region = net.regions[m_r]
                cap = f_alpha_capacity(region, net.alpha, region.v_b)
                check_ref, hat_ref, _ = g.critical_refs(m_r)
                for ia in range(len(g.regions[m_l])):
                    for ib in range(len(g.regions[m_r])):
                        left, right = Ref(m_l, ia), Ref(m_r, ib)
                        if m_l == m_r and ia == ib:
                            pass  # constant data still exercises the cases
                        sol = solve_constrained(g, left, right)
                        u = sol.sequence.state_at(region.v_b)
                        residual = g.level(u) - (cap + region.v_b * g.rho(u))
                        assert residual <= 1e-10
                        speeds = [w.speed for w in sol.sequence.waves]
                        assert all(b >= a - 1e-11 for a, b in zip(speeds, speeds[1:]))
                        for w in sol.sequence.waves:
                            if w.kind == "non_classical":
                                assert w.speed == region.v_b
                                assert w.left == hat_ref and w.right == check_ref
                        solves += 1
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0
    report(4, f"constraint, pair placement and speed order on {solves} constrained solves ({elapsed:.1f}s)")


def test_criterion_05_temple_monotonicity(battery):
    runs, elapsed = battery
    events = 0
    for res in runs:
        for e in res.state.events:
            assert e.temple_after <= e.temple_before + 1e-10, (
                f"Temple increased in seeded run: {e}"
            )
            events += 1
    # scripted non-classical creation: drop of at least 2 delta_lo
    net = RoadNetwork((), (RegionParams(1.0, 0.3),), 0.6)
    g = build_grid(net, minimal_level(net))
    check_ref, hat_ref, _ = g.critical_refs(0)
    below = g.regions[0].rhos[hat_ref.index - 1]
    prof = sample_initial(g, g.rho(hat_ref), [(0.5, below)])
    st = simulator.init(net, g, prof, 0.0)
    ev = simulator.next_event(st, 20.0)
    rec = simulator.resolve_event(st, *ev)
    assert any(f.kind == "non_classical" for f in st.fronts)
    assert rec.temple_before - rec.temple_after >= 2.0 * g.delta_lo - 1e-12
    assert elapsed < 300.0
    report(
        5,
        f"Temple non-increasing over {events} events in {len(runs)} randomized runs "
        f"({elapsed:.0f}s); scripted creation event dropped >= 2*delta_lo",
    )


def test_criterion_06_uniform_bounds(battery):
    runs, _ = battery
    checked = 0
    for res in runs:
        g, net = res.grid, res.network
        c = 2.0 * max(g.potential(m) for m in range(net.num_regions))
        bound = res.rows[0]["tv_z"] + net.tv_gamma() + c
        sup_bound = 0.25 * net.max_gamma()
        for row in res.rows:
            assert row["tv_z"] <= bound + 1e-9
        for snap in res.snapshots:
            zs = [g.z(r) for r in snap.refs]
            assert diag.total_variation(zs) <= bound + 1e-9
            assert max((abs(z) for z in zs), default=0.0) <= sup_bound + 1e-12
            checked += 1
    report(6, f"TV and sup-z bounds held at every event row and {checked} snapshots")


def test_criterion_07_l1_time_lipschitz(battery):
    runs, _ = battery
    pairs = 0
    for res in runs:
        g = res.grid
        c_ell = diag.lipschitz_constant(res.config)
        snaps = res.snapshots
        if len(snaps) < 2:
            continue
        lo = min((s.breaks[0] for s in snaps if s.breaks), default=0.0) - 1.0
        hi = max((s.breaks[-1] for s in snaps if s.breaks), default=0.0) + 1.0
        for i, a in enumerate(snaps):
            for b in snaps[i + 1 :]:
                d = diag.l1_distance(
                    a.breaks, [g.z(r) for r in a.refs],
                    b.breaks, [g.z(r) for r in b.refs],
                    (lo, hi),
                )
                assert d <= c_ell * (b.time - a.time) + 1e-9
                pairs += 1
    report(7, f"L1 modulus below C_l |t - s| for {pairs} snapshot pairs")


def test_criterion_08_weak_solution_audit(battery):
    runs, _ = battery
    audited = 0
    for res in runs[::10]:  # exact integration is the slow part
        worst = diag.mass_audit(res.state.intervals, res.grid, -2.0, 2.0)
        assert worst <= 1e-8
        audited += 1
    for res in runs:
        g = res.grid
        for rec in res.state.front_log.values():
            fl, fr = g.level(rec.left), g.level(rec.right)
            if rec.kind == "gamma_jump":
                assert abs(fl - fr) <= 1e-13
            else:
                drho = g.rho(rec.left) - g.rho(rec.right)
                assert abs(fl - fr - rec.speed * drho) <= 1e-12
    report(8, f"mass balance on {audited} runs; Rankine-Hugoniot on every front ever created")


def test_criterion_09_trajectory_identity(battery):
    runs, _ = battery
    segs = 0
    for res in runs:
        g, net = res.grid, res.network
        traj = res.state.trajectory
        y = traj[0][1]
        for (t0, y0, s0), (t1, y1, _) in zip(traj, traj[1:]):
            y = y + s0 * (t1 - t0)
            assert abs(y1 - y) <= 1e-9 * max(1.0, abs(y))
            segs += 1
        # speed law and constraint residual at every recorded row
        for row in res.rows:
            m = diag._region_at(net, row["y"])
            region = net.regions[m]
            expected = min(region.v_b, velocity(region.gamma, row["rho_right"]))
            assert abs(row["ydot"] - expected) <= 1e-11
            assert row["residual_left"] <= 1e-8
            assert row["residual_right"] <= 1e-8
    report(9, f"trajectory equals its own integral over {segs} segments; speed law and residuals held")


def test_criterion_10_convergence_probe():
    started = time.perf_counter()
    single = RoadNetwork((), (RegionParams(1.0, 0.3),), 0.6)
    crossing = RoadNetwork(
        (0.5,), (RegionParams(1.0, 0.25), RegionParams(2.0, 1.0)), 0.75
    )
    rarefaction = RoadNetwork(
        (0.5,), (RegionParams(1.0, 0.25), RegionParams(0.5, 0.125)), 0.75
    )
    scenarios = [
        ("single-region constrained", make_config(single, 0.41, [(0.8, 0.37)], 0.0, 1.0, [0.5, 1.0])),
        ("bottleneck crossing a boundary", make_config(crossing, 0.41, [(1.3, 0.19)], 0.0, 2.0, [1.0, 2.0])),
        ("rarefaction through a boundary", make_config(rarefaction, 0.81, [(0.2, 0.11)], 3.0, 1.0, [0.5, 1.0])),
    ]
    for name, cfg in scenarios:
        n0 = minimal_level(cfg.network)
        report_obj = diag.convergence_study(cfg, [n0, n0 + 1, n0 + 2, n0 + 3])
        d = report_obj.snapshot_distances
        assert d[0] > d[1] > d[2], f"{name}: distances {d} not strictly decreasing"
        s = report_obj.speed_distances
        assert all(a >= b - 1e-12 for a, b in zip(s[:-1], s[1:])), f"{name}: ydot distances {s}"
        assert report_obj.tv_bound_ok
    elapsed = time.perf_counter() - started
    assert elapsed < 600.0
    report(10, f"three scenarios converge monotonically toward the finest level ({elapsed:.0f}s)")


def test_criterion_11_front_count_bounded(battery):
    runs, _ = battery
    crossings = 0
    for res in runs:
        g = res.network
        cap = res.state.front_cap
        for row in res.rows:
            assert row["front_count"] <= cap
        # per-boundary-crossing growth is O(1/delta) with delta the grid step
        growth_bound = res.network.max_gamma() / (2.0 * res.grid.delta_lo) + 8
        counts = [row["front_count"] for row in res.rows]
        resolutions = [e for e in res.state.events if e.kind != "initial"]
        for e, before, after in zip(resolutions, counts, counts[1:]):
            if e.kind in ("bottleneck-gamma", "bottleneck-boundary"):
                assert after - before <= growth_bound
                crossings += 1
    report(11, f"no run hit the cap; growth at {crossings} boundary crossings within O(1/delta)")

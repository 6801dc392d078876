"""Command line entry point.

Subcommands:
    run       --config PATH [--n N] [--t-end T] [--out DIR]
    riemann   --gamma-l G --gamma-r G --rho-l R --rho-r R
              [--constrained --vb V --alpha A] [--n N]
    grid      --config PATH --dump [--n N] [--out DIR]
    converge  --config PATH --levels a,b,c [--out DIR]

Exit codes: 0 ok, 2 config error, 3 invariant violation, 4 front
explosion, 5 internal consistency error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import artifacts, diagnostics, riemann, simulator
from .config import RunConfig, load_config
from .errors import (
    ConfigError,
    FrontExplosionError,
    InternalConsistencyError,
    InvariantViolationError,
    LwrFrontError,
)
from .flux import RegionParams
from .grid import build_grid, minimal_level, sample_initial
from .network import RoadNetwork

EXIT_CODES = [
    (ConfigError, 2),
    (InvariantViolationError, 3),
    (FrontExplosionError, 4),
    (InternalConsistencyError, 5),
]


def _exit_code(err: Exception) -> int:
    for cls, code in EXIT_CODES:
        if isinstance(err, cls):
            return code
    return 1


def _resolve_level(cfg: RunConfig, override: int | None) -> int:
    n_min = minimal_level(cfg.network)
    n = override if override is not None else (cfg.n if cfg.n is not None else n_min)
    if n < n_min:
        raise ConfigError(f"level below minimal: n={n} < N_min={n_min}")
    return n


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    n = _resolve_level(cfg, args.n)
    t_end = args.t_end if args.t_end is not None else cfg.t_end
    out_dir = args.out or cfg.out_dir or "run_out"
    started = time.perf_counter()
    grid = build_grid(cfg.network, n)
    profile = sample_initial(grid, cfg.rho_left, list(cfg.pieces))
    state = simulator.init(
        cfg.network, grid, profile, cfg.y0, tol=cfg.tolerances, front_cap=cfg.front_cap
    )
    snap_times = [t for t in cfg.snapshot_times if t <= t_end] or [t_end]
    state, rows, snapshots = simulator.run(state, t_end, snap_times)
    _check_run_invariants(state, rows, cfg)
    wall = time.perf_counter() - started
    out = artifacts.write_run_dir(out_dir, state, rows, snapshots, grid, cfg.raw, wall)
    print(f"run complete: {len(state.events)} events, artifacts in {out}")
    return 0


def _check_run_invariants(state, rows, cfg: RunConfig) -> None:
    for e in state.events:
        if e.temple_after > e.temple_before + cfg.tolerances.temple:
            raise InvariantViolationError(f"Temple functional increased at t={e.time}")
    for r in rows:
        if max(r["residual_left"], r["residual_right"]) > cfg.tolerances.constraint:
            raise InvariantViolationError(
                f"capacity constraint violated at t={r['t']}: "
                f"residuals {r['residual_left']}, {r['residual_right']}"
            )


def cmd_riemann(args) -> int:
    if args.rho_l is None or args.rho_r is None:
        raise ConfigError("riemann needs --rho-l and --rho-r")
    alpha = args.alpha
    same = args.gamma_l == args.gamma_r
    if same:
        network = RoadNetwork(
            boundaries=(),
            regions=(RegionParams(args.gamma_l, args.vb),),
            alpha=alpha,
        )
        m_l = m_r = 0
    else:
        network = RoadNetwork(
            boundaries=(0.0,),
            regions=(
                RegionParams(args.gamma_l, min(args.vb, args.gamma_l * 0.5)),
                RegionParams(args.gamma_r, args.vb),
            ),
            alpha=alpha,
        )
        m_l, m_r = 0, 1
    n = args.n if args.n is not None else minimal_level(network)
    grid = build_grid(network, max(n, minimal_level(network)))
    left = grid.floor_ref(m_l, args.rho_l)
    right = grid.floor_ref(m_r, args.rho_r)
    print(f"grid level n={grid.n} (minimal {grid.n_min}); input snapped to grid states:")
    print(f"  left  rho={grid.rho(left)!r} z={grid.z(left)!r} (region {m_l})")
    print(f"  right rho={grid.rho(right)!r} z={grid.z(right)!r} (region {m_r})")
    sol = riemann.solve(grid, riemann.RiemannInput(left, right, constrained=args.constrained))
    seq = sol.sequence
    if args.constrained:
        print(f"constrained solve: case {sol.case}, bottleneck speed {sol.bottleneck_speed!r}")
    else:
        print("classical solve:")
    if not seq.waves:
        print("  constant state, no waves")
    for w in seq.waves:
        print(
            f"  {w.kind:16s} speed={w.speed!r:24s} "
            f"rho: {grid.rho(w.left)!r} -> {grid.rho(w.right)!r}"
        )
    return 0


def cmd_grid(args) -> int:
    cfg = load_config(args.config)
    n = _resolve_level(cfg, args.n)
    grid = build_grid(cfg.network, n)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        artifacts.write_grid_dump(out / "grid.tsv", grid)
        print(f"grid dump written to {out / 'grid.tsv'}")
    else:
        print("region\tindex\tz\trho\ttag")
        for row in grid.dump_rows():
            print("\t".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    return 0


def cmd_converge(args) -> int:
    cfg = load_config(args.config)
    levels = (
        tuple(int(v) for v in args.levels.split(",")) if args.levels else cfg.levels
    )
    if not levels:
        raise ConfigError("converge needs --levels or a 'levels' config entry")
    n_min = minimal_level(cfg.network)
    if min(levels) < n_min:
        raise ConfigError(f"level below minimal: n={min(levels)} < N_min={n_min}")
    report = diagnostics.convergence_study(cfg, levels)
    out_dir = Path(args.out or cfg.out_dir or "run_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "convergence.json"
    path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    print(f"convergence report written to {path}")
    print(f"  snapshot L1 to finest: {list(report.snapshot_distances)}")
    print(f"  ydot L1 to finest:     {list(report.speed_distances)}")
    print(f"  decreasing: {report.distances_decreasing}, tv bound ok: {report.tv_bound_ok}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lwrfront", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one configuration")
    run.add_argument("--config", required=True)
    run.add_argument("--n", type=int)
    run.add_argument("--t-end", type=float, dest="t_end")
    run.add_argument("--out")
    run.set_defaults(func=cmd_run)

    rie = sub.add_parser("riemann", help="print a single Riemann solve")
    rie.add_argument("--gamma-l", type=float, required=True, dest="gamma_l")
    rie.add_argument("--gamma-r", type=float, required=True, dest="gamma_r")
    rie.add_argument("--rho-l", type=float, required=True, dest="rho_l")
    rie.add_argument("--rho-r", type=float, required=True, dest="rho_r")
    rie.add_argument("--constrained", action="store_true")
    rie.add_argument("--vb", type=float, default=0.0)
    rie.add_argument("--alpha", type=float, default=0.75)
    rie.add_argument("--n", type=int)
    rie.set_defaults(func=cmd_riemann)

    gr = sub.add_parser("grid", help="dump the grid table")
    gr.add_argument("--config", required=True)
    gr.add_argument("--dump", action="store_true")
    gr.add_argument("--n", type=int)
    gr.add_argument("--out")
    gr.set_defaults(func=cmd_grid)

    conv = sub.add_parser("converge", help="cross-level convergence study")
    conv.add_argument("--config", required=True)
    conv.add_argument("--levels")
    conv.add_argument("--out")
    conv.set_defaults(func=cmd_converge)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LwrFrontError as err:
        print(f"error: {err}", file=sys.stderr)
        return _exit_code(err)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

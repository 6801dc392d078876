"""Wavefront tracking for LWR traffic with discontinuous speed limits and a moving bottleneck."""

from .config import RunConfig, load_config, parse_config
from .flux import (
    CriticalDensities,
    ModelParams,
    RegionParams,
    critical_densities,
    f_alpha_capacity,
    flux,
    psi,
    psi_inv,
    rho_star,
    shock_speed,
    velocity,
)
from .grid import (
    GridSystem,
    PiecewiseFlux,
    PiecewiseProfile,
    Ref,
    base_grid,
    build_grid,
    minimal_level,
    sample_initial,
    special_points,
)
from .network import RoadNetwork
from .riemann import (
    ConstrainedSolution,
    RiemannInput,
    Wave,
    WaveSequence,
    envelope_cross,
    solve,
    solve_classical,
    solve_constrained,
)
from .simulator import Bottleneck, EventRecord, Front, SimState, Tolerances, init, next_event, resolve_event, run

__all__ = [name for name in dir() if not name.startswith("_")]

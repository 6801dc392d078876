"""Run configuration: one JSON document describing network, data and run.

Schema (all lengths in road units, times in time units):

    {
      "network": {"boundaries": [0.5], "gamma": [1.0, 2.0], "v_b": [0.0, 1.0]},
      "alpha": 0.75,
      "y0": 0.0,
      "initial": {"left": 0.4, "pieces": [[0.25, 0.7], [0.8, 0.1]]},
      "n": 5,                      // optional, defaults to the minimal level
      "levels": [3, 4, 5],         // optional, used by the converge command
      "t_end": 1.0,
      "snapshots": [0.5, 1.0],     // optional, defaults to [t_end]
      "out": "runs/demo",          // optional, CLI flag overrides
      "tolerances": {"collision": 1e-12, "constraint": 1e-8, "temple": 1e-10},
      "front_cap": 1000000
    }

Speed limits must be dyadic rationals (k / 2^p); everything is validated
at load time and violations raise ConfigError naming the broken rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .flux import RegionParams
from .network import RoadNetwork
from .simulator import DEFAULT_FRONT_CAP, Tolerances


@dataclass(frozen=True)
class RunConfig:
    network: RoadNetwork
    y0: float
    rho_left: float
    pieces: tuple[tuple[float, float], ...]
    t_end: float
    snapshot_times: tuple[float, ...]
    n: int | None = None
    levels: tuple[int, ...] = ()
    out_dir: str | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    front_cap: int = DEFAULT_FRONT_CAP
    raw: dict = field(default_factory=dict, repr=False)


def _require(doc: dict, key: str):
    if key not in doc:
        raise ConfigError(f"missing required config key: {key!r}")
    return doc[key]


def parse_config(doc: dict) -> RunConfig:
    net = _require(doc, "network")
    gammas = list(_require(net, "gamma"))
    v_bs = list(net.get("v_b", [0.0] * len(gammas)))
    boundaries = tuple(float(b) for b in net.get("boundaries", []))
    if len(v_bs) != len(gammas):
        raise ConfigError("network.v_b must have one entry per region")
    alpha = float(_require(doc, "alpha"))
    regions = tuple(RegionParams(float(g), float(v)) for g, v in zip(gammas, v_bs))
    network = RoadNetwork(boundaries=boundaries, regions=regions, alpha=alpha)

    initial = doc.get("initial", {})
    rho_left = float(initial.get("left", 0.0))
    pieces = tuple((float(x), float(v)) for x, v in initial.get("pieces", []))
    for v in (rho_left, *(v for _, v in pieces)):
        if not 0.0 <= v <= 1.0:
            raise ConfigError(f"initial density {v} outside [0, 1]")

    t_end = float(_require(doc, "t_end"))
    if t_end <= 0.0:
        raise ConfigError("t_end must be positive")
    snapshots = tuple(float(t) for t in doc.get("snapshots", [t_end]))
    if any(t < 0.0 or t > t_end for t in snapshots):
        raise ConfigError("snapshot times must lie in [0, t_end]")

    tol_doc = doc.get("tolerances", {})
    tol = Tolerances(
        collision=float(tol_doc.get("collision", 1e-12)),
        constraint=float(tol_doc.get("constraint", 1e-8)),
        temple=float(tol_doc.get("temple", 1e-10)),
    )

    n = doc.get("n")
    levels = tuple(int(v) for v in doc.get("levels", []))
    return RunConfig(
        network=network,
        y0=float(doc.get("y0", 0.0)),
        rho_left=rho_left,
        pieces=pieces,
        t_end=t_end,
        snapshot_times=snapshots,
        n=int(n) if n is not None else None,
        levels=levels,
        out_dir=doc.get("out"),
        tolerances=tol,
        front_cap=int(doc.get("front_cap", DEFAULT_FRONT_CAP)),
        raw=doc,
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"parse error in {path} at line {e.lineno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return parse_config(doc)

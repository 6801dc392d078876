/**
 * Parsing and consistency validation of a run directory.
 *
 * A run directory is the contract between the simulator and this package:
 * delimited text tables (events, fronts, snapshots, trajectory,
 * diagnostics, grid) plus summary.json.  Anything inconsistent throws an
 * ArtifactError; renderers never draw partial data.
 */

import { readFileSync } from "fs";
import path from "path";

export class ArtifactError extends Error {}

export interface EventRow {
  time: number;
  position: number;
  kind: string;
  frontsIn: number[];
  frontsOut: number[];
  templeBefore: number;
  templeAfter: number;
}

export interface FrontRow {
  id: number;
  kind: string;
  birthTime: number;
  birthX: number;
  speed: number;
  deathTime: number;
  leftRegion: number;
  leftIndex: number;
  rightRegion: number;
  rightIndex: number;
  leftRho: number;
  rightRho: number;
  leftZ: number;
  rightZ: number;
}

export interface SnapshotPiece {
  time: number;
  xBreak: number; // -Infinity marks the left tail state
  region: number;
  index: number;
  rho: number;
  z: number;
}

export interface TrajectoryRow {
  time: number;
  y: number;
  ydot: number;
}

export interface DiagnosticsRow {
  t: number;
  temple: number;
  tvZ: number;
  frontCount: number;
  residualLeft: number;
  residualRight: number;
  xi: number;
}

export interface GridRow {
  region: number;
  index: number;
  z: number;
  rho: number;
  tag: string;
}

export interface NetworkConfig {
  boundaries: number[];
  gamma: number[];
  vB: number[];
  alpha: number;
}

export interface RunArtifacts {
  dir: string;
  events: EventRow[];
  fronts: FrontRow[];
  snapshots: Map<number, SnapshotPiece[]>;
  trajectory: TrajectoryRow[];
  diagnostics: DiagnosticsRow[];
  grid: GridRow[];
  network: NetworkConfig;
  tEnd: number;
  summary: Record<string, unknown>;
}

function readTable(dir: string, name: string, expected: string[]): string[][] {
  let text: string;
  try {
    text = readFileSync(path.join(dir, name), "utf8");
  } catch {
    throw new ArtifactError(`missing run artifact: ${name}`);
  }
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new ArtifactError(`empty run artifact: ${name}`);
  }
  const header = lines[0].split("\t");
  for (const col of expected) {
    if (!header.includes(col)) {
      throw new ArtifactError(`artifact ${name} lacks column ${col}`);
    }
  }
  return lines.slice(1).map((l) => l.split("\t"));
}

function num(cell: string, what: string): number {
  const v = cell === "-inf" ? -Infinity : cell === "inf" ? Infinity : Number(cell);
  if (Number.isNaN(v)) {
    throw new ArtifactError(`non-numeric ${what}: ${JSON.stringify(cell)}`);
  }
  return v;
}

function ids(cell: string): number[] {
  if (cell === "") return [];
  return cell.split(",").map((c) => {
    const v = Number(c);
    if (!Number.isInteger(v)) throw new ArtifactError(`bad front id list: ${cell}`);
    return v;
  });
}

export function loadRunDir(dir: string): RunArtifacts {
  let summary: Record<string, unknown>;
  try {
    summary = JSON.parse(readFileSync(path.join(dir, "summary.json"), "utf8"));
  } catch (e) {
    throw new ArtifactError(`missing or unreadable summary.json: ${e}`);
  }
  const config = summary["config"] as Record<string, unknown> | undefined;
  const netDoc = config?.["network"] as Record<string, unknown> | undefined;
  if (!netDoc) throw new ArtifactError("summary.json lacks the config echo");
  const tEnd = Number(summary["t_end"]);
  if (!Number.isFinite(tEnd)) throw new ArtifactError("summary.json lacks t_end");
  const network: NetworkConfig = {
    boundaries: (netDoc["boundaries"] as number[]) ?? [],
    gamma: netDoc["gamma"] as number[],
    vB: (netDoc["v_b"] as number[]) ?? [],
    alpha: Number(config?.["alpha"]),
  };
  if (!Array.isArray(network.gamma) || network.gamma.length === 0) {
    throw new ArtifactError("config echo has no region speed limits");
  }

  const events: EventRow[] = readTable(dir, "events.tsv", ["time", "kind"]).map((r) => ({
    time: num(r[0], "event time"),
    position: num(r[1], "event position"),
    kind: r[2],
    frontsIn: ids(r[3]),
    frontsOut: ids(r[4]),
    templeBefore: num(r[5], "temple"),
    templeAfter: num(r[6], "temple"),
  }));

  const fronts: FrontRow[] = readTable(dir, "fronts.tsv", ["id", "kind", "speed"]).map(
    (r) => ({
      id: num(r[0], "front id"),
      kind: r[1],
      birthTime: num(r[2], "birth time"),
      birthX: num(r[3], "birth x"),
      speed: num(r[4], "speed"),
      deathTime: num(r[5], "death time"),
      leftRegion: num(r[6], "region"),
      leftIndex: num(r[7], "index"),
      rightRegion: num(r[8], "region"),
      rightIndex: num(r[9], "index"),
      leftRho: num(r[10], "rho"),
      rightRho: num(r[11], "rho"),
      leftZ: num(r[12], "z"),
      rightZ: num(r[13], "z"),
    })
  );

  const snapshots = new Map<number, SnapshotPiece[]>();
  for (const r of readTable(dir, "snapshots.tsv", ["time", "x_break", "rho"])) {
    const piece: SnapshotPiece = {
      time: num(r[0], "snapshot time"),
      xBreak: num(r[1], "snapshot break"),
      region: num(r[2], "region"),
      index: num(r[3], "index"),
      rho: num(r[4], "rho"),
      z: num(r[5], "z"),
    };
    const list = snapshots.get(piece.time) ?? [];
    list.push(piece);
    snapshots.set(piece.time, list);
  }

  const trajectory: TrajectoryRow[] = readTable(dir, "trajectory.tsv", ["time", "y"]).map(
    (r) => ({ time: num(r[0], "time"), y: num(r[1], "y"), ydot: num(r[2], "ydot") })
  );

  const diagnostics: DiagnosticsRow[] = readTable(dir, "diagnostics.tsv", ["t", "temple"]).map(
    (r) => ({
      t: num(r[0], "t"),
      temple: num(r[1], "temple"),
      tvZ: num(r[2], "tv_z"),
      frontCount: num(r[3], "front count"),
      residualLeft: num(r[4], "residual"),
      residualRight: num(r[5], "residual"),
      xi: num(r[6], "xi"),
    })
  );

  const grid: GridRow[] = readTable(dir, "grid.tsv", ["region", "z", "rho", "tag"]).map(
    (r) => ({
      region: num(r[0], "region"),
      index: num(r[1], "index"),
      z: num(r[2], "z"),
      rho: num(r[3], "rho"),
      tag: r[4],
    })
  );

  const artifacts: RunArtifacts = {
    dir, events, fronts, snapshots, trajectory, diagnostics, grid, network, tEnd, summary,
  };
  validate(artifacts);
  return artifacts;
}

/** Cross-file consistency; throws ArtifactError on any contradiction. */
export function validate(a: RunArtifacts): void {
  const tol = 1e-9 * Math.max(1, a.tEnd);
  for (const e of a.events) {
    if (e.time < -tol || e.time > a.tEnd + tol) {
      throw new ArtifactError(`event at t=${e.time} outside [0, ${a.tEnd}]`);
    }
    if (e.templeAfter > e.templeBefore + 1e-9) {
      throw new ArtifactError(`event at t=${e.time} increases the interaction potential`);
    }
  }
  const known = new Set(a.fronts.map((f) => f.id));
  for (const e of a.events) {
    for (const id of [...e.frontsIn, ...e.frontsOut]) {
      if (!known.has(id)) {
        throw new ArtifactError(`event references unknown front ${id}`);
      }
    }
  }
  const eventTimes = a.events.map((e) => e.time);
  for (const row of a.trajectory.slice(1, -1)) {
    // every trajectory kink must coincide with an event time
    if (!eventTimes.some((t) => Math.abs(t - row.time) <= tol)) {
      throw new ArtifactError(`trajectory row at t=${row.time} has no matching event`);
    }
  }
  for (const [t] of a.snapshots) {
    if (t < -tol || t > a.tEnd + tol) {
      throw new ArtifactError(`snapshot at t=${t} outside [0, ${a.tEnd}]`);
    }
  }
  for (const f of a.fronts) {
    if (f.deathTime + tol < f.birthTime) {
      throw new ArtifactError(`front ${f.id} dies before it is born`);
    }
  }
}

/**
 * The three renderers.  Each consumes validated RunArtifacts and returns
 * an SVG string; writing is left to the CLI so tests can inspect output
 * without touching the filesystem.
 */

import { ArtifactError, RunArtifacts, SnapshotPiece } from "./artifacts.js";
import { Plot } from "./svg.js";

const KIND_COLORS: Record<string, string> = {
  shock: "#c0392b",
  rarefaction_fan: "#2980b9",
  gamma_jump: "#7f8c8d",
  non_classical: "#8e44ad",
};

/** Space-time diagram: one segment per front lifetime, dashed bottleneck. */
export function renderSpacetime(a: RunArtifacts): string {
  const xs: number[] = [];
  const times = [0, a.tEnd];
  for (const f of a.fronts) {
    xs.push(f.birthX, f.birthX + f.speed * (f.deathTime - f.birthTime));
  }
  for (const r of a.trajectory) xs.push(r.y);
  for (const b of a.network.boundaries) xs.push(b);
  const pad = 0.05 * Math.max(1e-9, Math.max(...xs) - Math.min(...xs));
  const plot = new Plot({
    x0: Math.min(...xs) - pad,
    x1: Math.max(...xs) + pad,
    y0: times[0],
    y1: times[1] * 1.02,
  });

  for (const b of a.network.boundaries) {
    plot.line(b, 0, b, a.tEnd, `stroke="#bbb" stroke-width="1" stroke-dasharray="2,3"`);
  }
  for (const f of a.fronts) {
    const color = KIND_COLORS[f.kind] ?? "#111";
    const xEnd = f.birthX + f.speed * (f.deathTime - f.birthTime);
    plot.line(
      f.birthX, f.birthTime, xEnd, f.deathTime,
      `stroke="${color}" stroke-width="${f.kind === "non_classical" ? 2.4 : 1.3}"`,
      `data-front-id="${f.id}" data-kind="${f.kind}"`
    );
  }
  plot.polyline(
    a.trajectory.map((r) => [r.y, r.time]),
    `stroke="#111" stroke-width="2" stroke-dasharray="6,4"`,
    `data-role="bottleneck"`
  );
  plot.axes("x", "t");
  return plot.render("fronts and bottleneck trajectory");
}

function nearestSnapshot(a: RunArtifacts, time: number): [number, SnapshotPiece[]] {
  let best: number | null = null;
  for (const t of a.snapshots.keys()) {
    if (best === null || Math.abs(t - time) < Math.abs(best - time)) best = t;
  }
  if (best === null) throw new ArtifactError("run has no snapshots");
  if (Math.abs(best - time) > 1e-6 * Math.max(1, a.tEnd) + 1e-9) {
    throw new ArtifactError(
      `no snapshot at t=${time}; available: ${[...a.snapshots.keys()].join(", ")}`
    );
  }
  return [best, a.snapshots.get(best)!];
}

/** Flux curve of one region with the capacity line and the marked states. */
export function renderFundamental(a: RunArtifacts, region: number, time: number): string {
  const gamma = a.network.gamma[region];
  if (gamma === undefined) {
    throw new ArtifactError(`region ${region} not in the network (${a.network.gamma.length} regions)`);
  }
  const vB = a.network.vB[region] ?? 0;
  const alpha = a.network.alpha;
  const cap = (alpha / (4 * gamma)) * (gamma - vB) * (gamma - vB);
  const [snapT, pieces] = nearestSnapshot(a, time);

  const plot = new Plot({ x0: 0, x1: 1, y0: 0, y1: 0.27 * gamma });
  const curve: Array<[number, number]> = [];
  for (let i = 0; i <= 200; i++) {
    const rho = i / 200;
    curve.push([rho, gamma * rho * (1 - rho)]);
  }
  plot.polyline(curve, `stroke="#222" stroke-width="1.5"`, `data-role="fundamental-diagram"`);
  plot.polyline(
    [
      [0, cap],
      [1, cap + vB],
    ],
    `stroke="#c0392b" stroke-width="1.2" stroke-dasharray="5,3"`,
    `data-role="capacity-line"`
  );

  for (const row of a.grid) {
    if (row.region !== region) continue;
    if (row.tag === "rho_hat" || row.tag === "rho_check" || row.tag === "rho_star") {
      const f = gamma * row.rho * (1 - row.rho);
      plot.circle(row.rho, f, 4, `fill="none" stroke="#8e44ad" stroke-width="1.5"`,
        `data-role="${row.tag}"`);
      plot.text(row.rho, f + 0.015 * gamma, row.tag.replace("rho_", ""));
    }
  }
  for (const p of pieces) {
    if (p.region !== region) continue;
    plot.circle(p.rho, gamma * p.rho * (1 - p.rho), 3, `fill="#2980b9"`,
      `data-role="state" data-rho="${p.rho}"`);
  }
  plot.axes("rho", "flux");
  return plot.render(`region ${region} at t=${snapT} (gamma=${gamma}, v_b=${vB})`);
}

/** Time series of the functionals plus the residuals. */
export function renderDiagnostics(a: RunArtifacts): string {
  const rows = a.diagnostics;
  if (rows.length === 0) throw new ArtifactError("diagnostics table is empty");
  const maxY = Math.max(
    ...rows.map((r) => Math.max(r.temple, r.tvZ, Math.abs(r.xi))),
    1e-9
  );
  const plot = new Plot({ x0: 0, x1: Math.max(a.tEnd, 1e-9), y0: 0, y1: 1.1 * maxY });
  plot.polyline(rows.map((r) => [r.t, r.temple]), `stroke="#8e44ad" stroke-width="1.8"`,
    `data-series="temple"`);
  plot.polyline(rows.map((r) => [r.t, r.tvZ]), `stroke="#2980b9" stroke-width="1.5"`,
    `data-series="tv_z"`);
  plot.polyline(rows.map((r) => [r.t, Math.abs(r.xi)]), `stroke="#27ae60" stroke-width="1.2"`,
    `data-series="abs_xi"`);
  const maxCount = Math.max(...rows.map((r) => r.frontCount), 1);
  plot.polyline(
    rows.map((r) => [r.t, (r.frontCount / maxCount) * maxY]),
    `stroke="#aaa" stroke-width="1" stroke-dasharray="3,3"`,
    `data-series="front_count_scaled"`
  );
  plot.axes("t", "value");
  plot.rawText(600, 36, "potential", "start");
  plot.rawText(600, 50, "TV(z)", "start");
  plot.rawText(600, 64, "|xi|", "start");
  return plot.render("diagnostics time series");
}

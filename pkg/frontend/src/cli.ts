#!/usr/bin/env node
/**
 * lwrfront-plots <run-dir> [--spacetime] [--fd REGION TIME] [--diag]
 *
 * Renders the selected figures (all three with default settings when no
 * flag is given) as SVG files inside the run directory.  Exits nonzero
 * without writing anything if the run artifacts are missing or mutually
 * inconsistent.
 */

import { writeFileSync } from "fs";
import path from "path";

import { ArtifactError, loadRunDir, RunArtifacts } from "./artifacts.js";
import { renderDiagnostics, renderFundamental, renderSpacetime } from "./plots.js";

interface Job {
  name: string;
  render: (a: RunArtifacts) => string;
}

export function parseArgs(argv: string[]): { dir: string; jobs: Job[] } {
  if (argv.length === 0) {
    throw new ArtifactError("usage: lwrfront-plots <run-dir> [--spacetime] [--fd REGION TIME] [--diag]");
  }
  const dir = argv[0];
  const jobs: Job[] = [];
  let i = 1;
  while (i < argv.length) {
    const flag = argv[i];
    if (flag === "--spacetime") {
      jobs.push({ name: "spacetime.svg", render: renderSpacetime });
      i += 1;
    } else if (flag === "--diag") {
      jobs.push({ name: "diagnostics.svg", render: renderDiagnostics });
      i += 1;
    } else if (flag === "--fd") {
      const region = Number(argv[i + 1]);
      const time = Number(argv[i + 2]);
      if (!Number.isInteger(region) || Number.isNaN(time)) {
        throw new ArtifactError("--fd needs REGION (integer) and TIME (number)");
      }
      jobs.push({
        name: `fundamental_r${region}_t${time}.svg`,
        render: (a) => renderFundamental(a, region, time),
      });
      i += 3;
    } else {
      throw new ArtifactError(`unknown flag: ${flag}`);
    }
  }
  if (jobs.length === 0) {
    jobs.push({ name: "spacetime.svg", render: renderSpacetime });
    jobs.push({ name: "diagnostics.svg", render: renderDiagnostics });
    jobs.push({
      name: "fundamental_r0_final.svg",
      render: (a) => renderFundamental(a, 0, lastSnapshotTime(a)),
    });
  }
  return { dir, jobs };
}

function lastSnapshotTime(a: RunArtifacts): number {
  const times = [...a.snapshots.keys()];
  if (times.length === 0) throw new ArtifactError("run has no snapshots");
  return Math.max(...times);
}

export function run(argv: string[]): number {
  try {
    const { dir, jobs } = parseArgs(argv);
    const artifacts = loadRunDir(dir);
    for (const job of jobs) {
      const svg = job.render(artifacts);
      const target = path.join(dir, job.name);
      writeFileSync(target, svg);
      console.log(`wrote ${target}`);
    }
    return 0;
  } catch (err) {
    if (err instanceof ArtifactError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    console.error(err);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(path.basename(process.argv[1]));
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}

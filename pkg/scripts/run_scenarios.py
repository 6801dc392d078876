#!/usr/bin/env python3
"""Run the three reference scenarios and their convergence studies.

Produces one run directory per scenario under runs/ plus a convergence
report for each, using the packaged CLI so the artifacts match what any
downstream tooling consumes.
"""

import pathlib
import sys

from lwrfront.cli import main

CONFIGS = sorted((pathlib.Path(__file__).parent / "configs").glob("*.json"))


def run_all() -> int:
    for cfg in CONFIGS:
        print(f"== {cfg.name}")
        code = main(["run", "--config", str(cfg)])
        if code != 0:
            return code
        code = main(["converge", "--config", str(cfg)])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run_all())

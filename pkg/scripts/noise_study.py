#!/usr/bin/env python3
"""Replanning-vs-noise study: transitional cost weight sweep on a scenario.

Runs the chosen scenario under the radar noise preset across many seeds,
once with the configured transitional cost weight and once with it zeroed,
and reports how often the planner switches its committed first maneuver.

Usage: python scripts/noise_study.py [--scenario NAME] [--seeds N] [--weight W]
"""

import argparse

import numpy as np

from colavmpc import config as cfgm
from colavmpc import scenarios, sim


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", choices=scenarios.SCENARIO_NAMES, default="head_on")
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--weight", type=float, default=4200.0)
    args = parser.parse_args()

    results = {args.weight: [], 0.0: []}
    min_distances = []
    for seed in range(args.seeds):
        for w_tran in (args.weight, 0.0):
            data = scenarios.build_config_dict(args.scenario, seed=seed, noise="radar")
            data["weights"]["tran"] = w_tran
            _, metrics = sim.run(cfgm.from_dict(data))
            results[w_tran].append(metrics.switch_count)
            min_distances.append(metrics.obstacles["target"].min_distance)

    print(f"scenario: {args.scenario}, radar noise, {args.seeds} seeds")
    for w_tran, counts in results.items():
        print(
            f"  w_tran = {w_tran:>7.1f}: switches median {np.median(counts):.1f} "
            f"mean {np.mean(counts):.1f} max {max(counts)}"
        )
    print(f"  min distance over all runs: {min(min_distances):.1f} m")


if __name__ == "__main__":
    main()

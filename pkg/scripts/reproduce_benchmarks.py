#!/usr/bin/env python3
"""Reproduce the benchmark table at desk scale.

Runs the six gamma tail-probability settings (plus the noninferiority
and imbalanced-allocation variants) over several seeds and prints the
mean prior-adjusted SSSD parameters next to the benchmark values.

Usage: python scripts/reproduce_benchmarks.py [--seeds 10] [--oracle]

--oracle additionally runs the brute-force length-criterion check at the
median of each estimated SSSD (slow; a few minutes per setting).
"""

import argparse
import math
import sys
import time

import numpy as np

sys.path.insert(0, "tests")  # reuse the benchmark fixtures

from conftest import (
    BENCHMARK_SETTINGS,
    gamma_design,
    informative_priors,
    log_ratio_test,
    uninformative_priors,
)
from eqdesign import simulate_length_criterion, stage_two
from eqdesign.adjustment import TestWithLength

VARIANTS = [
    ("NI-1b", 0.3, 0.9, 0.7, False, 1.0, True, 192.56),
    ("NI-2b", 0.3, 0.9, 0.7, True, 1.0, True, 162.17),
    ("q2-1b", 0.3, 0.9, 0.7, False, 2.0, False, 270.43),
    ("q2-2b", 0.3, 0.9, 0.7, True, 2.0, False, 246.52),
]


def run(label, dstar, gamma, power, informative, q, noninf, seeds):
    design = gamma_design(q=q)
    priors = informative_priors() if informative else uninformative_priors()
    test = log_ratio_test(dstar, gamma, power, noninferiority=noninf)
    results = []
    tick = time.perf_counter()
    for seed in seeds:
        results.append(stage_two(design, priors, test, seed=seed))
    elapsed = time.perf_counter() - tick
    return results, elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--oracle", action="store_true")
    parser.add_argument("--reps", type=int, default=500)
    parser.add_argument("--workers", type=int, default=4)
    args = parser.parse_args()
    seeds = list(range(1, args.seeds + 1))

    print(f"{'setting':>8} {'mu_hat':>9} {'target':>9} {'sigma_hat':>9} "
          f"{'target':>7} {'l_hat':>7} {'sec/run':>8}")
    rows = []
    for label, gamma, power, dstar, informative, mu_t, sigma_t in BENCHMARK_SETTINGS:
        results, elapsed = run(label, dstar, gamma, power, informative, 1.0, False, seeds)
        mu = np.mean([r.mu_hat for r in results])
        sigma = np.mean([r.sigma_hat for r in results])
        l = np.mean([r.stage1.l for r in results])
        print(f"{label:>8} {mu:9.2f} {mu_t:9.2f} {sigma:9.2f} {sigma_t:7.2f} "
              f"{l:7.3f} {elapsed / len(seeds):8.2f}")
        rows.append((label, results[0], informative, dstar, gamma, power))

    for label, dstar, gamma, power, informative, q, noninf, mu_t in VARIANTS:
        results, elapsed = run(label, dstar, gamma, power, informative, q, noninf, seeds)
        mu = np.mean([r.mu_hat for r in results])
        sigma = np.mean([r.sigma_hat for r in results])
        l = np.mean([r.stage1.l for r in results])
        print(f"{label:>8} {mu:9.2f} {mu_t:9.2f} {sigma:9.2f} {'-':>7} "
              f"{l:7.3f} {elapsed / len(seeds):8.2f}")

    if args.oracle:
        print("\nbrute-force length-criterion checks at the SSSD median:")
        for label, result, informative, dstar, gamma, power in rows:
            design = gamma_design()
            priors = informative_priors() if informative else uninformative_priors()
            test = TestWithLength(log_ratio_test(dstar, gamma, power), result.stage1.l)
            n = math.ceil(result.mu_hat)
            est = simulate_length_criterion(
                design, priors, test, n, result.stage1.l,
                reps=args.reps, m=10_000, seed=11, workers=args.workers,
            )
            print(f"{label:>8}: Pr(length <= l) at n={n}: "
                  f"{est.proportion:.4f} (se {est.se:.4f}, expected ~0.5)")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Generate demo design reports for the benchmark settings.

Writes one report JSON per setting into the target directory (default
frontend/test/fixtures).  The browser UI's tests replay these fixtures;
they are also handy as documented example outputs.

Usage: python scripts/make_demo_reports.py [--out DIR]
"""

import argparse
import os

from eqdesign.report import execute_design

SETTINGS = {
    "setting_1a": (0.5, 0.6, 0.25, False),
    "setting_1b": (0.9, 0.7, 0.30, False),
    "setting_1c": (0.8, 0.8, 0.15, False),
    "setting_2b": (0.9, 0.7, 0.30, True),
}

UNINFORMATIVE = [
    {"dist": "gamma", "shape": 2, "rate": 0.1},
    {"dist": "gamma", "shape": 2, "rate": 0.1},
]
INFORMATIVE_G1 = [
    {"dist": "gamma", "shape": 33.79, "rate": 15.66},
    {"dist": "gamma", "shape": 26.96, "rate": 37.92},
]
INFORMATIVE_G2 = [
    {"dist": "gamma", "shape": 105.53, "rate": 42.97},
    {"dist": "gamma", "shape": 85.43, "rate": 106.31},
]


def build_config(gamma, target_power, delta_star, informative, seed=1):
    return {
        "design": {
            "family": "gamma",
            "eta1": [2.11, 0.69],
            "eta2": [2.43, 0.79],
            "characteristic": {
                "kind": "tail_probability",
                "threshold": 4.29,
                "comparison": "log_ratio",
            },
            "q": 1.0,
        },
        "priors": {
            "group1": INFORMATIVE_G1 if informative else UNINFORMATIVE,
            "group2": INFORMATIVE_G2 if informative else UNINFORMATIVE,
        },
        "test": {
            "gamma": gamma,
            "target_power": target_power,
            "delta_star": delta_star,
        },
        "seed": seed,
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="frontend/test/fixtures")
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for name, (gamma, power, dstar, informative) in SETTINGS.items():
        config = build_config(gamma, power, dstar, informative)
        payload, report, _ = execute_design(config, cache_dir=None)
        path = os.path.join(args.out, f"{name}.json")
        with open(path, "wb") as fh:
            fh.write(payload)
        rec = report["recommendation"]
        print(f"{name}: n={rec['n']} mu={report['sssd']['mu']:.2f} -> {path}")


if __name__ == "__main__":
    main()

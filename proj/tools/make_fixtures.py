#!/usr/bin/env python3
"""Regenerate the synthetic cohort fixtures in data/.

The early cohort is a pure Gompertz hazard (beta = 0.077, m0 = 1.9e-4) with
2% multiplicative log-normal noise. The late cohort samples the model's
endogenous mortality curve under the default config (run the CLI `profile`
command first to produce age_profile.csv) with the same noise level.

The shipped CSVs are frozen; rerunning this script reproduces them bit for
bit with the pinned seed.

Usage: make_fixtures.py <age_profile.csv> <out_dir>
"""

import csv
import math
import random
import sys


def main():
    profile_csv, out_dir = sys.argv[1], sys.argv[2]
    rng = random.Random(12345)
    beta, m0, noise_sd = 0.077, 1.9e-4, 0.02

    with open(f"{out_dir}/cohort_1900.csv", "w") as f:
        f.write("age,rate\n")
        for age in range(25, 96):
            rate = m0 * math.exp(beta * age) * math.exp(noise_sd * rng.gauss(0, 1))
            f.write(f"{age},{rate:.10g}\n")

    with open(profile_csv) as f:
        model = {float(r["age"]): float(r["mortality"]) for r in csv.DictReader(f)}
    with open(f"{out_dir}/cohort_1940.csv", "w") as f:
        f.write("age,rate\n")
        for age in range(35, 96):
            rate = model[float(age)] * math.exp(noise_sd * rng.gauss(0, 1))
            f.write(f"{age},{rate:.10g}\n")


if __name__ == "__main__":
    main()

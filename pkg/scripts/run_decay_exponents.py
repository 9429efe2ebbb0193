#!/usr/bin/env python3
"""Reproduce the optimal polynomial energy-decay exponents.

Runs the low-band fits for p = 0, 1, 2 and the high-band fit for m = 2 on the
reference and critical media and prints a comparison table against the
predicted exponents (p + 3/2, and m or m/2).
"""

import argparse
import time

import lorentzmodes as lm
from lorentzmodes import energy as en


def media():
    reference = lm.new_medium(1, 1, [(1, 1, 0.1)], [(1, 2, 0.2)])
    critical = lm.new_medium(1, 1, [(1, 1, 0.0), (1, 1.5, 0.3)], [(1, 2, 0.0)])
    return reference, critical


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args()

    reference, critical = media()
    rows = []

    for p in (0.0, 1.0, 2.0):
        t0 = time.monotonic()
        rep = en.verify_gamma_lf(reference, p, threads=args.threads)
        rows.append((f"reference lf p={p:g}", rep.target, rep.fitted, time.monotonic() - t0))

    for name, medium in (("reference", reference), ("critical", critical)):
        t0 = time.monotonic()
        rep = en.verify_gamma_hf(medium, 2.0, threads=args.threads)
        rows.append((f"{name} hf m=2", rep.target, rep.fitted, time.monotonic() - t0))

    print(f"{'experiment':<24}{'target':>8}{'fitted':>9}{'seconds':>9}")
    for name, target, fitted, seconds in rows:
        print(f"{name:<24}{target:>8.3f}{fitted:>9.4f}{seconds:>9.1f}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Measure the series-multiplication kernel: schoolbook vs the packed
GMP path, across lengths and coefficient sizes.

Usage: python scripts/benchmark_multiplication.py [--max-len 32768]
Informs the _SCHOOLBOOK_CUTOFF threshold in congruence_forge.intpoly.
"""

import argparse
import random
import time

from congruence_forge import intpoly


def bench(fn, a, b, reps=3):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(a, b, len(a) + len(b) - 1)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-len", type=int, default=16384)
    ap.add_argument("--digits", type=int, default=40, help="decimal digits per coefficient")
    args = ap.parse_args()

    rng = random.Random(1)
    bound = 10**args.digits
    print(f"coefficients up to {args.digits} digits")
    print(f"{'len':>8} {'schoolbook':>12} {'packed-gmp':>12} {'speedup':>9}")
    n = 16
    while n <= args.max_len:
        a = [rng.randint(-bound, bound) for _ in range(n)]
        b = [rng.randint(-bound, bound) for _ in range(n)]
        tk = bench(intpoly._kronecker, a, b)
        if n <= 4096:
            ts = bench(intpoly._schoolbook, a, b)
            print(f"{n:>8} {ts * 1e3:>10.2f}ms {tk * 1e3:>10.2f}ms {ts / tk:>8.1f}x")
        else:
            print(f"{n:>8} {'-':>12} {tk * 1e3:>10.2f}ms")
        n *= 4


if __name__ == "__main__":
    main()

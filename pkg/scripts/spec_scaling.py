"""Time spectrum enumeration for free monoids and for a chain of relations x_i = x_{i+1}^2."""

import argparse
import time

from monoid_points.core import MonoidPresentation
from monoid_points.spectrum import spec


def chain(k: int) -> MonoidPresentation:
    names = [f"g{i}" for i in range(k)]
    rels = []
    for i in range(k - 1):
        u = [0] * k
        v = [0] * k
        u[i], v[i + 1] = 1, 2
        rels.append((tuple(u), tuple(v)))
    return MonoidPresentation(tuple(names), tuple(rels))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-k", type=int, default=16)
    args = ap.parse_args()
    print(f"{'k':>3} {'free primes':>12} {'free s':>8} {'chain primes':>13} {'chain s':>8}")
    for k in range(1, args.max_k + 1):
        t = time.perf_counter()
        nf = len(spec(MonoidPresentation.free([f"g{i}" for i in range(k)]), cap=args.max_k))
        tf = time.perf_counter() - t
        t = time.perf_counter()
        nc = len(spec(chain(k), cap=args.max_k))
        tc = time.perf_counter() - t
        print(f"{k:>3} {nf:>12} {tf:>8.3f} {nc:>13} {tc:>8.3f}")


if __name__ == "__main__":
    main()

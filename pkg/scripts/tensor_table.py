"""Tensor products of localizations M_p (x) M_q for a presentation, classified back to primes."""

import argparse
import time

from monoid_points.io import load_json, presentation_from_json
from monoid_points.msets import classify_point, localization_at, tensor
from monoid_points.spectrum import prime_meet, spec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("monoid", nargs="?", default="free2.json", help="presentation JSON or corpus name")
    args = ap.parse_args()
    M = presentation_from_json(load_json(args.monoid))
    L = spec(M)
    labels = [p.label for p in L.primes]
    width = max(len(s) for s in labels) + 2
    t = time.perf_counter()
    print(" " * width + "".join(s.ljust(width) for s in labels))
    mismatches = 0
    for p in L.primes:
        row = []
        for q in L.primes:
            c = classify_point(tensor(localization_at(p), localization_at(q)))
            mismatches += c.prime != prime_meet(p, q, L)
            row.append(f"{c.prime.label}@{c.window}")
        print(p.label.ljust(width) + "".join(s.ljust(width) for s in row))
    print(f"cells differing from the lattice meet: {mismatches}; {time.perf_counter() - t:.2f}s")


if __name__ == "__main__":
    main()

"""Global sections of O(n) on the projective line, with window stabilization data."""

import argparse

from monoid_points.graded import GradedMonoid
from monoid_points.schemes import global_sections, proj, twisting_sheaf


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--min-n", type=int, default=-3)
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--windows", type=int, nargs="+", default=[4, 6, 8, 10])
    args = ap.parse_args()
    G = GradedMonoid.free("xy")
    X = proj(G)
    print("n  " + " ".join(f"w={w:<3}" for w in args.windows) + "  sections")
    for n in range(args.min_n, args.max_n + 1):
        F = twisting_sheaf(X, n)
        counts = [len(global_sections(F, w)) for w in args.windows]
        secs = global_sections(F, args.windows[-1])
        words = sorted(G.base.word(fam[0][1]) for fam in secs)
        print(f"{n:<3}" + " ".join(f"{c:<5}" for c in counts) + "  " + ", ".join(words))


if __name__ == "__main__":
    main()

"""Table of kappa bounds over a log grid of sample sizes.

    python scripts/bound_table.py --m 10000 --n 4 --mu 4e-4 --delta 0.01
"""

import argparse

from rowsampling import BoundId, evaluate_bound_curve, log_points


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=10_000)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--mu", type=float, default=4e-4)
    ap.add_argument("--lam", type=float, help="||Q^T L Q||; defaults to mu (an upper bound)")
    ap.add_argument("--delta", type=float, default=0.01)
    ap.add_argument("--points", type=int, default=12)
    args = ap.parse_args()

    cs = log_points(args.n, args.m, args.points)
    lam = args.mu if args.lam is None else args.lam
    cols = {b: evaluate_bound_curve(b, args.m, args.n, cs, args.mu, args.delta, lam=lam)
            for b in BoundId}
    print(f"{'c':>8}" + "".join(f"{b.value:>10}" for b in BoundId))
    for i, c in enumerate(cs):
        cells = []
        for b in BoundId:
            p = cols[b][i]
            cells.append(f"{p.kappa_bound:10.4f}" if p.applicable else f"{'-':>10}")
        print(f"{c:>8}" + "".join(cells))
    print("\nB6 uses keep probability c/m; '-' marks c where a bound does not apply.")


if __name__ == "__main__":
    main()

"""Sample-size sweep on a 500x4 matrix with coherence 2n/m.

Runs uniform sampling with replacement for every c in [4, 500], evaluates the
Chernoff bound on the same grid, and writes CSV results plus two SVG panels.

    python scripts/example1.py --out results/example1 --runs 10 --seed 1
"""

import argparse
from pathlib import Path

from rowsampling import BoundId, ExperimentConfig, MatrixSource, Method, run_experiment
from rowsampling.io import write_results_csv
from rowsampling.plotting import render_plots


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/example1")
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=0)
    args = ap.parse_args()

    m, n = 500, 4
    cfg = ExperimentConfig(
        m=m, n=n, c=list(range(n, m + 1)), mu=2 * n / m, delta=0.01, runs=args.runs,
        samplers=[Method.WITH_REPLACEMENT], bounds=[BoundId.B1],
        matrix=MatrixSource("givens", "one_big"), seed=args.seed, name="example1",
    )
    result = run_experiment(cfg, workers=args.workers)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    paths = write_results_csv(result, args.out)
    panels = render_plots(result, None, args.out)

    curve = result.bound_curves[BoundId.B1]
    first = next(i for i, p in enumerate(curve) if p.applicable)
    aggs = result.aggregates()
    print(f"B1 applies from c = {result.grid[first]} (kappa bound {curve[first].kappa_bound:.3f})")
    for c in (4, 8, 16, 50, 125, 250, 500):
        a = aggs[c - n]
        med = "-" if a.kappa_median is None else f"{a.kappa_median:.3f}"
        print(f"c = {c:3d}: failure rate {a.failure_rate:.2f}, median kappa {med}")
    for p in list(paths.values()) + list(panels):
        print("wrote", p)


if __name__ == "__main__":
    main()

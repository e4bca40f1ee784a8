"""Monte Carlo check that each bound holds for its samplers.

For every admissible (bound, sampler) pair, reports the worst observed
fraction of trials that failed or exceeded the bound, next to delta.

    python scripts/coverage.py --runs 500
"""

import argparse
import math

from rowsampling import BoundId, ExperimentConfig, MatrixSource, Method, log_points, run_experiment
from rowsampling.experiment import admissible_pairs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=2000)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--mu", type=float, default=0.003)
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--runs", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = ExperimentConfig(
        m=args.m, n=args.n, c=log_points(args.n, args.m, 15), mu=args.mu, delta=args.delta,
        runs=args.runs, samplers=[Method.WITHOUT_REPLACEMENT, Method.WITH_REPLACEMENT,
                                  Method.BERNOULLI],
        bounds=list(BoundId), matrix=MatrixSource("givens", "one_big"), seed=args.seed,
    )
    res = run_experiment(cfg, workers=0)
    slack = 4 * math.sqrt(args.delta * (1 - args.delta) / args.runs)
    print(f"delta = {args.delta}, allowed with sampling noise = {args.delta + slack:.4f}")
    for bound, sampler in admissible_pairs(res):
        fr = [f for f in res.violation_fractions(bound, sampler) if f is not None]
        if not fr:
            print(f"{bound.value} / {sampler.value:20s}: never applicable on this grid")
            continue
        print(f"{bound.value} / {sampler.value:20s}: worst violation {max(fr):.4f} "
              f"over {len(fr)} applicable c")


if __name__ == "__main__":
    main()

"""Batch of three experiments followed by a restyled re-plot.

Writes a batch file comparing the three uniform samplers at two coherence
levels, runs it in order, then redraws every entry from its CSV output with a
custom plot style (log c axis, taller kappa range, CI band on failures).

    python scripts/batch_restyle.py --out results/batch
"""

import argparse
import json
from pathlib import Path

from rowsampling.io import parse_config, parse_plot_style, read_results_csv, run_batch
from rowsampling.plotting import render_plots

STYLE = {"x_scale": "log", "y_cap": 100, "ci_display": True, "width": 720}


def entry(name, sampler, bound, mu):
    return {
        "name": name, "m": 1000, "n": 5, "c": {"lo": 5, "hi": 1000, "count": 40}, "mu": mu,
        "delta": 0.05, "runs": 20, "seed": 7, "samplers": [sampler], "bounds": [bound],
        "matrix": {"generator": "givens", "distribution": "many_big"},
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/batch")
    args = ap.parse_args()

    batch = [
        entry("without_replacement", "without_replacement", "B2", 0.02),
        entry("with_replacement", "with_replacement", "B4", 0.02),
        entry("bernoulli", "bernoulli", "B6", 0.02),
    ]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    batch_file = out.with_suffix(".json")
    batch_file.write_text(json.dumps(batch, indent=2))

    reports = run_batch(parse_config(batch_file.read_text()), out, workers=0)
    style = parse_plot_style(STYLE)
    for r in reports:
        if not r.ok:
            print(f"entry {r.index} ({r.name}) failed: {r.error}")
            continue
        restyled = r.stem.with_name(r.stem.name + "_styled")
        kp, fp = render_plots(read_results_csv(r.stem), style, restyled)
        print(f"entry {r.index} ({r.name}): {r.stem}_*.csv, {kp.name}, {fp.name}")


if __name__ == "__main__":
    main()

"""Command-line entry point: ``rowsampling <subcommand> ...``.

Exit codes: 0 success, 1 configuration error, 2 runtime error, 3 partial
batch failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path


from . import bounds as bd
from .distributions import dist_many_big, dist_one_big, validate_profile
from .experiment import ConfigError, log_points
from .generation import generate_from_leverage
from .io import (
    load_config,
    parse_plot_style,
    read_matrix_csv,
    read_results_csv,
    read_vector_csv,
    run_batch,
    write_matrix_csv,
    write_results_csv,
    write_vector_csv,
)
from .linalg import coherence, leverage_scores, projected_leverage_norm

log = logging.getLogger("rowsampling")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_PARTIAL = 0, 1, 2, 3


def _int_list(text: str) -> list[int]:
    """``"4,8,16"``, ``"4:500"`` (every integer) or ``"4:500:log20"``."""
    if ":" in text:
        parts = text.split(":")
        lo, hi = int(parts[0]), int(parts[1])
        if len(parts) == 3 and parts[2].startswith("log"):
            return log_points(lo, hi, int(parts[2][3:]))
        step = int(parts[2]) if len(parts) == 3 else 1
        return list(range(lo, hi + 1, step))
    return [int(x) for x in text.split(",")]


def cmd_gen_matrix(args) -> int:
    if args.profile:
        prof = validate_profile(read_vector_csv(args.profile), args.m, args.n)
    elif args.distribution == "one_big":
        prof = dist_one_big(args.m, args.n, args.mu)
    else:
        prof = dist_many_big(args.m, args.n, args.mu)
    Q, trace = generate_from_leverage(prof)
    write_matrix_csv(Q, args.output)
    log.info("wrote %dx%d matrix to %s (%d rotations, defect %.2e)",
             Q.shape[0], Q.shape[1], args.output, trace.rotation_count, trace.final_defect)
    return EXIT_OK


def cmd_leverage(args) -> int:
    Q = read_matrix_csv(args.matrix)
    prof = leverage_scores(Q)
    if args.output:
        write_vector_csv(prof.scores, args.output)
    else:
        for v in prof.scores:
            print(repr(float(v)))
    print(f"# coherence {prof.mu!r}", file=sys.stderr)
    print(f"# projected leverage norm {projected_leverage_norm(Q)!r}", file=sys.stderr)
    return EXIT_OK


def cmd_bound(args) -> int:
    mu, lam = args.mu, args.lam
    if args.matrix:
        Q = read_matrix_csv(args.matrix)
        mu = coherence(Q) if mu is None else mu
        lam = projected_leverage_norm(Q) if lam is None else lam
    if mu is None:
        raise ConfigError("--mu or --matrix is required")
    cs = _int_list(args.c)
    points = bd.evaluate_bound_curve(args.bound, args.m, args.n, cs, mu, args.delta,
                                     lam=lam, gamma=args.gamma)
    print("c,bound_id,applicable,epsilon,kappa_bound")
    bid = bd.BoundId.parse(args.bound).value
    for c, pt in zip(cs, points):
        if pt.applicable:
            print(f"{c},{bid},1,{pt.epsilon!r},{pt.kappa_bound!r}")
        else:
            print(f"{c},{bid},0,,")
    return EXIT_OK


def _load_single(path):
    parsed = load_config(path)
    if isinstance(parsed, list):
        raise ConfigError(f"{path}: expected a single experiment, got a batch")
    return parsed


def cmd_run(args) -> int:
    from .experiment import run_experiment
    from .plotting import render_plots

    cfg, style = _load_single(args.config)
    cfg.seed = args.seed
    if args.runs is not None:
        cfg.runs = args.runs
    if args.delta is not None:
        cfg.delta = args.delta
    cfg.validate()
    stem = args.output or Path(args.config).with_suffix("")
    result = run_experiment(cfg, workers=args.workers)
    paths = write_results_csv(result, stem)
    if not args.no_plot:
        render_plots(result, style, stem)
    log.info("wrote %s", ", ".join(str(p) for p in paths.values()))
    for a in result.aggregates():
        log.info("grid %s %s: failures %d/%d, median kappa %s", a.grid_value, a.sampler.value,
                 a.failures, a.runs, a.kappa_median)
    return EXIT_OK


def cmd_batch(args) -> int:
    entries = load_config(args.batch)
    if not isinstance(entries, list):
        raise ConfigError(f"{args.batch}: expected a JSON array of experiments")
    stem = args.output or Path(args.batch).with_suffix("")
    reports = run_batch(entries, stem, workers=args.workers, plots=not args.no_plot)
    summary = [
        {"index": r.index, "name": r.name, "ok": r.ok,
         "stem": str(r.stem) if r.stem else None, "error": r.error}
        for r in reports
    ]
    print(json.dumps(summary, indent=2))
    return EXIT_OK if all(r.ok for r in reports) else EXIT_PARTIAL


def cmd_plot(args) -> int:
    from .plotting import render_plots

    result = read_results_csv(args.stem)
    style = None
    if args.style:
        style = parse_plot_style(json.loads(Path(args.style).read_text(encoding="utf-8")))
    render_plots(result, style, args.output or args.stem)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rowsampling", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-matrix", help="generate Q with a prescribed leverage profile")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--mu", type=float)
    g.add_argument("--distribution", choices=["one_big", "many_big"], default="one_big")
    g.add_argument("--profile", help="CSV file with one leverage score per line")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen_matrix)

    lv = sub.add_parser("leverage", help="leverage scores and coherence of a matrix CSV")
    lv.add_argument("matrix")
    lv.add_argument("-o", "--output")
    lv.set_defaults(func=cmd_leverage)

    b = sub.add_parser("bound", help="evaluate a kappa bound over c")
    b.add_argument("--bound", required=True)
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--c", required=True, help='"200", "4,50,500", "4:500" or "4:500:log20"')
    b.add_argument("--mu", type=float)
    b.add_argument("--delta", type=float, required=True)
    b.add_argument("--lam", type=float)
    b.add_argument("--gamma", type=float)
    b.add_argument("--matrix", help="matrix CSV used to compute mu and lam")
    b.set_defaults(func=cmd_bound)

    r = sub.add_parser("run", help="run one experiment from a JSON config")
    r.add_argument("config")
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--runs", type=int)
    r.add_argument("--delta", type=float)
    r.add_argument("-o", "--output", help="output stem (default: config path without suffix)")
    r.add_argument("--workers", type=int, default=1, help="threads; 0 = all CPUs")
    r.add_argument("--no-plot", action="store_true")
    r.set_defaults(func=cmd_run)

    bt = sub.add_parser("batch", help="run a JSON array of experiments in order")
    bt.add_argument("batch")
    bt.add_argument("-o", "--output", help="output stem (default: batch path without suffix)")
    bt.add_argument("--workers", type=int, default=1)
    bt.add_argument("--no-plot", action="store_true")
    bt.set_defaults(func=cmd_batch)

    pl = sub.add_parser("plot", help="re-render SVG plots from result CSVs")
    pl.add_argument("stem")
    pl.add_argument("--style", help="JSON file with plot style fields")
    pl.add_argument("-o", "--output")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

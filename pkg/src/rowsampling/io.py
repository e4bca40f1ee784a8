"""JSON configuration, CSV serialization and batch execution.

Config schema (version 1), one JSON object per experiment::

    {
      "schema": 1,
      "name": "example1",                       # optional
      "m": 500, "n": 4,
      "c": {"start": 4, "stop": 500},           # or an int, a list, or
                                                # {"lo": 4, "hi": 500, "count": 40}
      "mu": 0.016,                              # or a list / {"lo", "hi", "count"}
      "delta": 0.01, "runs": 10, "seed": 1,
      "samplers": ["with_replacement"],         # names or numbers 1-4
      "bounds": ["B1"],                         # B1..B6
      "matrix": {"generator": "givens", "distribution": "one_big"},
      "ci_level": 0.95, "ci_method": "wald",
      "recompute_leverage": false,
      "plot": {"y_cap": 10, "x_scale": "linear"}
    }

``matrix`` may instead be ``{"file": "Q.csv"}``, ``{"generator": "givens",
"distribution": "explicit", "profile": [...]}`` or ``null`` (bounds only).
A batch is a JSON array of such objects.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .bounds import BoundId, BoundPoint
from .experiment import (
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    MatrixSource,
    TrialRecord,
    log_points,
    log_points_double,
    run_experiment,
)
from .sampling import Method

SCHEMA_VERSION = 1

TRIAL_COLUMNS = ["grid_value", "grid_index", "sampler", "trial_index", "realized_c", "failed", "kappa"]
BOUND_COLUMNS = ["grid_value", "bound_id", "applicable", "epsilon", "kappa_bound"]

_KNOWN_KEYS = {
    "schema", "name", "m", "n", "c", "mu", "delta", "runs", "seed", "samplers",
    "bounds", "matrix", "ci_level", "ci_method", "recompute_leverage", "plot",
}


def fmt_float(x: float) -> str:
    """Shortest decimal string that reads back to the same float64."""
    return repr(float(x))


# -- matrices ----------------------------------------------------------------

def write_matrix_csv(M, path) -> None:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {M.shape}")
    with open(path, "w", newline="") as fh:
        for row in M:
            fh.write(",".join(fmt_float(v) for v in row) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            try:
                values = [float(f) for f in fields]
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric field") from None
            if not all(math.isfinite(v) for v in values):
                raise ValueError(f"{path}:{lineno}: non-finite value")
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ValueError(
                    f"{path}:{lineno}: ragged row with {len(values)} fields, expected {width}"
                )
            rows.append(values)
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    return np.array(rows, dtype=np.float64)


def write_vector_csv(v, path) -> None:
    with open(path, "w", newline="") as fh:
        for x in np.asarray(v, dtype=np.float64).reshape(-1):
            fh.write(fmt_float(x) + "\n")


def read_vector_csv(path) -> np.ndarray:
    M = read_matrix_csv(path)
    if M.shape[1] != 1:
        raise ValueError(f"{path}: expected one value per line")
    return M[:, 0]


# -- plot style ----------------------------------------------------------------

@dataclass
class PlotStyle:
    x_scale: str = "linear"
    y_scale: str = "log"
    failure_y_scale: str = "linear"
    y_cap: float = 10.0
    width: int = 640
    height: int = 420
    ci_display: bool = False
    sampler_colors: dict = field(default_factory=lambda: {
        "without_replacement": "#1f77b4", "with_replacement": "#2ca02c",
        "bernoulli": "#d62728", "leverage": "#9467bd",
    })
    bound_dashes: dict = field(default_factory=lambda: {
        "B1": "", "B2": "8,4", "B3": "2,3", "B4": "6,3,2,3", "B5": "12,4", "B6": "4,4",
    })
    marker_size: float = 4.0
    line_width: float = 2.0

    def __post_init__(self):
        if not self.y_cap > 1:
            raise ValueError(f"y_cap must exceed 1, got {self.y_cap!r}")
        for attr in ("x_scale", "y_scale", "failure_y_scale"):
            if getattr(self, attr) not in ("linear", "log"):
                raise ValueError(f"{attr} must be 'linear' or 'log'")


def parse_plot_style(obj: Optional[dict]) -> PlotStyle:
    if obj is None:
        return PlotStyle()
    if not isinstance(obj, dict):
        raise ConfigError("plot: expected an object")
    base = PlotStyle()
    kwargs = {}
    for k, v in obj.items():
        if not hasattr(base, k):
            raise ConfigError(f"plot.{k}: unknown field")
        if isinstance(getattr(base, k), dict):
            merged = dict(getattr(base, k))
            merged.update(v)
            v = merged
        kwargs[k] = v
    try:
        return PlotStyle(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"plot: {exc}") from None


# -- configs -------------------------------------------------------------------

def _need(obj: dict, key: str, path: str):
    if key not in obj:
        raise ConfigError(f"{path}.{key}: required field missing")
    return obj[key]


def _int(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or v != int(v):
        raise ConfigError(f"{path}: expected an integer, got {v!r}")
    return int(v)


def _num(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {v!r}")
    return float(v)


def _parse_c(v, path: str):
    if isinstance(v, list):
        return [_int(x, f"{path}[{i}]") for i, x in enumerate(v)]
    if isinstance(v, dict):
        if "count" in v:
            lo = _int(_need(v, "lo", path), f"{path}.lo")
            hi = _int(_need(v, "hi", path), f"{path}.hi")
            try:
                return log_points(lo, hi, _int(v["count"], f"{path}.count"))
            except ValueError as exc:
                raise ConfigError(f"{path}: {exc}") from None
        start = _int(_need(v, "start", path), f"{path}.start")
        stop = _int(_need(v, "stop", path), f"{path}.stop")
        step = _int(v.get("step", 1), f"{path}.step")
        if step < 1:
            raise ConfigError(f"{path}.step: must be positive")
        return list(range(start, stop + 1, step))
    return _int(v, path)


def _parse_mu(v, path: str):
    if v is None:
        return None
    if isinstance(v, list):
        return [_num(x, f"{path}[{i}]") for i, x in enumerate(v)]
    if isinstance(v, dict):
        lo = _num(_need(v, "lo", path), f"{path}.lo")
        hi = _num(_need(v, "hi", path), f"{path}.hi")
        try:
            return log_points_double(lo, hi, _int(_need(v, "count", path), f"{path}.count"))
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return _num(v, path)


def _parse_matrix(v, path: str) -> Optional[MatrixSource]:
    if v is None:
        return None
    if not isinstance(v, dict):
        raise ConfigError(f"{path}: expected an object or null")
    if "file" in v:
        return MatrixSource(kind="file", path=str(v["file"]))
    gen = v.get("generator", "givens")
    if gen != "givens":
        raise ConfigError(f"{path}.generator: unknown generator {gen!r}")
    dist = v.get("distribution", "one_big")
    if dist not in ("one_big", "many_big", "explicit"):
        raise ConfigError(f"{path}.distribution: unknown distribution {dist!r}")
    profile = v.get("profile")
    if profile is not None:
        if isinstance(profile, str):
            profile = read_vector_csv(profile).tolist()
        else:
            profile = [_num(x, f"{path}.profile[{i}]") for i, x in enumerate(profile)]
    return MatrixSource(kind="givens", distribution=dist, profile=profile)


def config_from_dict(obj, path: str = "$") -> tuple[ExperimentConfig, PlotStyle]:
    """Build a config from a parsed JSON object, checking the schema."""
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    schema = obj.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"{path}.schema: unsupported version {schema!r}")
    unknown = set(obj) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}: unknown field")
    m = _int(_need(obj, "m", path), f"{path}.m")
    n = _int(_need(obj, "n", path), f"{path}.n")
    c = _parse_c(_need(obj, "c", path), f"{path}.c")
    mu = _parse_mu(obj.get("mu"), f"{path}.mu")
    if isinstance(c, list) == isinstance(mu, list):
        raise ConfigError(f"{path}: exactly one of c and mu must be a vector")
    samplers = []
    for i, s in enumerate(obj.get("samplers", [])):
        try:
            samplers.append(Method.parse(s))
        except ValueError as exc:
            raise ConfigError(f"{path}.samplers[{i}]: {exc}") from None
    bounds = []
    for i, b in enumerate(obj.get("bounds", [])):
        try:
            bounds.append(BoundId.parse(b))
        except ValueError as exc:
            raise ConfigError(f"{path}.bounds[{i}]: {exc}") from None
    seed = obj.get("seed", 0)
    cfg = ExperimentConfig(
        m=m, n=n, c=c, mu=mu,
        delta=_num(_need(obj, "delta", path), f"{path}.delta"),
        runs=_int(obj.get("runs", 10), f"{path}.runs"),
        samplers=samplers,
        bounds=bounds,
        matrix=_parse_matrix(obj.get("matrix"), f"{path}.matrix"),
        seed=_int(seed, f"{path}.seed"),
        ci_level=_num(obj.get("ci_level", 0.95), f"{path}.ci_level"),
        ci_method=str(obj.get("ci_method", "wald")),
        recompute_leverage=bool(obj.get("recompute_leverage", False)),
        name=obj.get("name"),
    )
    return cfg, parse_plot_style(obj.get("plot"))


def config_to_dict(cfg: ExperimentConfig) -> dict:
    if cfg.matrix is None:
        matrix = None
    elif cfg.matrix.kind == "file":
        matrix = {"file": cfg.matrix.path}
    else:
        matrix = {"generator": "givens", "distribution": cfg.matrix.distribution}
        if cfg.matrix.profile is not None:
            matrix["profile"] = list(cfg.matrix.profile)
    out = {
        "schema": SCHEMA_VERSION, "m": cfg.m, "n": cfg.n, "c": cfg.c, "mu": cfg.mu,
        "delta": cfg.delta, "runs": cfg.runs, "seed": cfg.seed,
        "samplers": [s.value for s in cfg.samplers], "bounds": [b.value for b in cfg.bounds],
        "matrix": matrix, "ci_level": cfg.ci_level, "ci_method": cfg.ci_method,
        "recompute_leverage": cfg.recompute_leverage,
    }
    if cfg.name is not None:
        out["name"] = cfg.name
    return out


@dataclass
class BatchEntry:
    config: Optional[ExperimentConfig]
    style: PlotStyle
    name: str
    error: Optional[str] = None


def parse_config(text: str):
    """Parse a JSON config or batch.

    Returns ``(ExperimentConfig, PlotStyle)`` for an object and a list of
    :class:`BatchEntry` for an array. Schema errors in a single config raise
    :class:`ConfigError`; in a batch they are attached to the entry so the
    remaining entries can still run.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    if isinstance(obj, dict):
        return config_from_dict(obj)
    if not isinstance(obj, list):
        raise ConfigError("$: expected an object or an array")
    entries = []
    for i, item in enumerate(obj, start=1):
        name = item.get("name") if isinstance(item, dict) else None
        try:
            cfg, style = config_from_dict(item, f"$[{i - 1}]")
            entries.append(BatchEntry(cfg, style, name or str(i)))
        except ConfigError as exc:
            entries.append(BatchEntry(None, PlotStyle(), name or str(i), str(exc)))
    names = [e.name for e in entries]
    dupes = sorted({x for x in names if names.count(x) > 1})
    if dupes:
        raise ConfigError(f"$: duplicate entry names {dupes}")
    return entries


def load_config(path):
    return parse_config(Path(path).read_text(encoding="utf-8"))


# -- results -------------------------------------------------------------------

def _grid_str(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return fmt_float(v)


def _grid_parse(s: str):
    return int(s) if s.lstrip("-").isdigit() else float(s)


def result_paths(stem) -> dict[str, Path]:
    stem = Path(stem)
    return {
        "trials": stem.with_name(stem.name + "_trials.csv"),
        "bounds": stem.with_name(stem.name + "_bounds.csv"),
        "meta": stem.with_name(stem.name + "_meta.json"),
    }


def write_results_csv(result: ExperimentResult, stem) -> dict[str, Path]:
    """Write ``<stem>_trials.csv``, ``<stem>_bounds.csv`` and ``<stem>_meta.json``."""
    paths = result_paths(stem)
    try:
        with open(paths["trials"], "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRIAL_COLUMNS)
            for t in result.trials:
                w.writerow([
                    _grid_str(result.grid[t.grid_index]), t.grid_index, t.sampler.value,
                    t.trial_index, t.realized_c, int(t.failed),
                    "" if t.failed else fmt_float(t.kappa),
                ])
        with open(paths["bounds"], "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(BOUND_COLUMNS)
            for bid, curve in result.bound_curves.items():
                for gi, pt in enumerate(curve):
                    w.writerow([
                        _grid_str(result.grid[gi]), bid.value, int(pt.applicable),
                        fmt_float(pt.epsilon) if pt.applicable else "",
                        fmt_float(pt.kappa_bound) if pt.applicable else "",
                    ])
        meta = {
            "schema": SCHEMA_VERSION,
            "sweep": result.sweep,
            "grid": [_grid_str(v) for v in result.grid],
            "ci_level": result.ci_level,
            "ci_method": result.ci_method,
            "bounds": [b.value for b in result.bound_curves],
            "config": config_to_dict(result.config) if result.config else None,
        }
        paths["meta"].write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write results to {exc.filename}: {exc.strerror}") from exc
    return paths


def read_results_csv(stem) -> ExperimentResult:
    """Inverse of :func:`write_results_csv`."""
    paths = result_paths(stem)
    meta = json.loads(paths["meta"].read_text(encoding="utf-8"))
    grid = [_grid_parse(s) for s in meta["grid"]]
    trials = []
    with open(paths["trials"], newline="") as fh:
        for row in csv.DictReader(fh):
            failed = row["failed"] == "1"
            trials.append(TrialRecord(
                int(row["grid_index"]), int(row["trial_index"]), Method(row["sampler"]),
                int(row["realized_c"]), failed, None if failed else float(row["kappa"]),
            ))
    curves: dict[BoundId, list[BoundPoint]] = {BoundId(b): [] for b in meta["bounds"]}
    with open(paths["bounds"], newline="") as fh:
        for row in csv.DictReader(fh):
            if row["applicable"] == "1":
                pt = BoundPoint(True, float(row["epsilon"]), float(row["kappa_bound"]))
            else:
                pt = BoundPoint(False)
            curves.setdefault(BoundId(row["bound_id"]), []).append(pt)
    cfg = None
    if meta.get("config"):
        cfg, _ = config_from_dict(meta["config"])
    return ExperimentResult(cfg, meta["sweep"], grid, trials, curves,
                            meta["ci_level"], meta["ci_method"])


# -- batches -------------------------------------------------------------------

@dataclass
class BatchReport:
    index: int
    name: str
    ok: bool
    stem: Optional[Path] = None
    error: Optional[str] = None


def run_batch(entries: list[BatchEntry], batch_stem, workers: Optional[int] = None,
              plots: bool = True) -> list[BatchReport]:
    """Run batch entries in order, writing ``<batch_stem>_<k>`` outputs.

    A failing entry is recorded in the report and does not stop the rest.
    """
    from .plotting import render_plots

    reports = []
    for k, entry in enumerate(entries, start=1):
        stem = Path(f"{batch_stem}_{k}")
        if entry.config is None:
            reports.append(BatchReport(k, entry.name, False, error=entry.error))
            continue
        try:
            result = run_experiment(entry.config, workers=workers)
            write_results_csv(result, stem)
            if plots:
                render_plots(result, entry.style, stem)
        except (ValueError, OSError) as exc:
            reports.append(BatchReport(k, entry.name, False, error=str(exc)))
            continue
        reports.append(BatchReport(k, entry.name, True, stem=stem))
    return reports

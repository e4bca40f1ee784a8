"""Monte Carlo experiments on the condition number of sampled matrices.

An experiment sweeps either the sample size ``c`` or the coherence ``mu``.
At each grid point every selected sampler is run ``runs`` times on a test
matrix; each trial records ``kappa(SQ)`` or a failure (numerical rank
deficiency). Requested bounds are evaluated on the same grid.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Optional, Union

import numpy as np

from .bounds import ADMISSIBLE_SAMPLERS, BoundId, BoundPoint, evaluate_bound_curve
from .distributions import dist_many_big, dist_one_big, validate_profile
from .generation import generate_from_leverage
from .linalg import LeverageProfile, condition_number, leverage_scores, projected_leverage_norm
from .sampling import Method, RngStream, sample

DISTRIBUTIONS = ("one_big", "many_big", "explicit")


class ConfigError(ValueError):
    """An experiment configuration is invalid."""


@dataclass
class MatrixSource:
    """Where the test matrix comes from.

    ``kind="givens"`` builds the matrix from a leverage profile (one of
    ``DISTRIBUTIONS``); ``kind="file"`` reads a CSV matrix from ``path``.
    """

    kind: str = "givens"
    distribution: str = "one_big"
    profile: Optional[list[float]] = None
    path: Optional[str] = None


@dataclass
class ExperimentConfig:
    m: int
    n: int
    c: Union[int, list[int], None]
    mu: Union[float, list[float], None]
    delta: float
    runs: int = 10
    samplers: list[Method] = field(default_factory=list)
    bounds: list[BoundId] = field(default_factory=list)
    matrix: Optional[MatrixSource] = None
    seed: int = 0
    ci_level: float = 0.95
    ci_method: str = "wald"
    recompute_leverage: bool = False
    name: Optional[str] = None

    @property
    def sweep(self) -> str:
        return "c" if isinstance(self.c, (list, tuple)) else "mu"

    @property
    def grid(self) -> list:
        return list(self.c) if self.sweep == "c" else list(self.mu)

    def validate(self) -> None:
        m, n = self.m, self.n
        if not (isinstance(m, int) and isinstance(n, int) and m >= n >= 1):
            raise ConfigError(f"need integers m >= n >= 1, got m={m!r}, n={n!r}")
        c_vec = isinstance(self.c, (list, tuple))
        mu_vec = isinstance(self.mu, (list, tuple))
        if c_vec == mu_vec:
            raise ConfigError("exactly one of c and mu must be a vector")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta!r}")
        if not isinstance(self.runs, int) or self.runs < 1:
            raise ConfigError(f"runs must be a positive integer, got {self.runs!r}")
        if not self.samplers and not self.bounds:
            raise ConfigError("select at least one sampler or bound")
        if not 0.0 < self.ci_level < 1.0:
            raise ConfigError(f"ci_level must lie in (0, 1), got {self.ci_level!r}")
        if self.ci_method not in ("wald", "wilson"):
            raise ConfigError(f"ci_method must be 'wald' or 'wilson', got {self.ci_method!r}")
        if c_vec:
            if len(self.c) == 0:
                raise ConfigError("c grid is empty")
            for c in self.c:
                if not isinstance(c, (int, np.integer)) or not n <= c <= m:
                    raise ConfigError(f"c grid value {c!r} outside [n, m] = [{n}, {m}]")
        elif not isinstance(self.c, (int, np.integer)) or not n <= self.c <= m:
            raise ConfigError(f"c must be an integer in [n, m] = [{n}, {m}], got {self.c!r}")
        mus = self.mu if mu_vec else ([] if self.mu is None else [self.mu])
        if mu_vec and len(mus) == 0:
            raise ConfigError("mu grid is empty")
        for mu in mus:
            if not n / m - 1e-12 <= mu <= 1.0:
                raise ConfigError(f"mu value {mu!r} outside [n/m, 1]")

        src = self.matrix
        if src is None:
            if self.samplers:
                raise ConfigError("samplers need a matrix source")
            if BoundId.B2 in self.bounds:
                raise ConfigError("bound B2 needs a matrix source to compute ||Q^T L Q||")
            if self.mu is None:
                raise ConfigError("mu is required without a matrix source")
            return
        if src.kind == "givens":
            if src.distribution not in DISTRIBUTIONS:
                raise ConfigError(f"unknown leverage distribution {src.distribution!r}")
            if src.distribution == "explicit":
                if mu_vec:
                    raise ConfigError("an explicit profile fixes mu; sweep c instead")
                if src.profile is None:
                    raise ConfigError("explicit distribution needs a profile")
                try:
                    validate_profile(src.profile, m, n)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
            elif self.mu is None:
                raise ConfigError(f"distribution {src.distribution!r} needs mu")
        elif src.kind == "file":
            if mu_vec:
                raise ConfigError("a matrix file fixes mu; sweep c instead")
            if not src.path:
                raise ConfigError("matrix file source needs a path")
        else:
            raise ConfigError(f"unknown matrix source kind {src.kind!r}")


@dataclass(frozen=True)
class TrialRecord:
    grid_index: int
    trial_index: int
    sampler: Method
    realized_c: int
    failed: bool
    kappa: Optional[float]


@dataclass
class GridAggregate:
    grid_index: int
    grid_value: float
    sampler: Method
    runs: int
    failures: int
    failure_rate: float
    ci_low: float
    ci_high: float
    ci_degenerate: bool
    kappa_min: Optional[float]
    kappa_median: Optional[float]
    kappa_max: Optional[float]


@dataclass
class ExperimentResult:
    config: Optional[ExperimentConfig]
    sweep: str
    grid: list
    trials: list[TrialRecord]
    bound_curves: dict[BoundId, list[BoundPoint]]
    ci_level: float = 0.95
    ci_method: str = "wald"

    def samplers(self) -> list[Method]:
        seen = []
        for t in self.trials:
            if t.sampler not in seen:
                seen.append(t.sampler)
        return sorted(seen, key=lambda s: s.number)

    def trials_for(self, sampler, grid_index: Optional[int] = None) -> list[TrialRecord]:
        sampler = Method.parse(sampler)
        return [t for t in self.trials if t.sampler is sampler
                and (grid_index is None or t.grid_index == grid_index)]

    def aggregates(self) -> list[GridAggregate]:
        """Per (grid point, sampler) failure rates, confidence intervals and kappa summary."""
        groups: dict[tuple[int, Method], list[TrialRecord]] = {}
        for t in self.trials:
            groups.setdefault((t.grid_index, t.sampler), []).append(t)
        out = []
        for (gi, s), ts in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1].number)):
            failures = sum(t.failed for t in ts)
            runs = len(ts)
            lo, hi = failure_confidence_interval(failures, runs, self.ci_level, self.ci_method)
            kap = np.array([t.kappa for t in ts if not t.failed], dtype=float)
            out.append(GridAggregate(
                gi, self.grid[gi], s, runs, failures, failures / runs, lo, hi,
                lo == hi,
                float(kap.min()) if kap.size else None,
                float(np.median(kap)) if kap.size else None,
                float(kap.max()) if kap.size else None,
            ))
        return out

    def violation_fractions(self, bound_id, sampler) -> list[Optional[float]]:
        """Fraction of trials that failed or exceeded the bound, per grid point.

        ``None`` where the bound is inapplicable or the sampler has no trials.
        """
        curve = self.bound_curves[BoundId.parse(bound_id)]
        out = []
        for gi, pt in enumerate(curve):
            ts = self.trials_for(sampler, gi)
            if not pt.applicable or not ts:
                out.append(None)
                continue
            bad = sum(t.failed or t.kappa > pt.kappa_bound for t in ts)
            out.append(bad / len(ts))
        return out


# -- grids ---------------------------------------------------------------------

def log_points(lo: int, hi: int, k: int) -> list[int]:
    """``k`` logarithmically spaced integers from ``lo`` to ``hi``, rounded and deduplicated.

    >>> log_points(1, 100, 5)
    [1, 3, 10, 32, 100]
    """
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if not 1 <= lo <= hi:
        raise ValueError(f"need 1 <= lo <= hi, got lo={lo}, hi={hi}")
    pts = np.floor(np.exp(np.linspace(math.log(lo), math.log(hi), k)) + 0.5).astype(int)
    pts[0], pts[-1] = lo, hi
    out = []
    for p in pts.tolist():
        if not out or p > out[-1]:
            out.append(p)
    return out


def log_points_double(lo: float, hi: float, k: int) -> list[float]:
    """``k`` logarithmically spaced reals from ``lo`` to ``hi`` (collapses to ``[lo]`` if equal)."""
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if not lo > 0:
        raise ValueError(f"lo must be positive, got {lo}")
    if hi < lo:
        raise ValueError(f"need lo <= hi, got lo={lo}, hi={hi}")
    if hi == lo:
        return [float(lo)]
    pts = np.exp(np.linspace(math.log(lo), math.log(hi), k))
    pts[0], pts[-1] = lo, hi
    return pts.tolist()


# -- statistics ------------------------------------------------------------------

def failure_confidence_interval(failures: int, runs: int, level: float = 0.95,
                                method: str = "wald") -> tuple[float, float]:
    """Confidence interval for a failure probability, clipped to [0, 1].

    ``method="wald"`` is the normal-approximation interval
    ``p +- z sqrt(p (1 - p) / runs)``, which has zero width when no trial or
    every trial failed. ``method="wilson"`` gives the Wilson score interval.
    """
    if not (isinstance(runs, (int, np.integer)) and runs >= 1):
        raise ValueError(f"runs must be a positive integer, got {runs!r}")
    if not 0 <= failures <= runs:
        raise ValueError(f"need 0 <= failures <= runs, got {failures}/{runs}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level!r}")
    z = NormalDist().inv_cdf(0.5 * (1.0 + level))
    p = failures / runs
    if method == "wald":
        half = z * math.sqrt(p * (1.0 - p) / runs)
        return max(0.0, p - half), min(1.0, p + half)
    if method == "wilson":
        z2 = z * z
        denom = 1.0 + z2 / runs
        centre = (p + z2 / (2 * runs)) / denom
        half = z * math.sqrt(p * (1.0 - p) / runs + z2 / (4 * runs * runs)) / denom
        return max(0.0, centre - half), min(1.0, centre + half)
    raise ValueError(f"unknown interval method {method!r}")


# -- running -------------------------------------------------------------------

@dataclass
class _TestMatrix:
    Q: Optional[np.ndarray]
    profile: Optional[LeverageProfile]
    mu: float
    lam: Optional[float]


def _target_profile(config: ExperimentConfig, mu: Optional[float]) -> LeverageProfile:
    src = config.matrix
    if src.distribution == "one_big":
        return dist_one_big(config.m, config.n, mu)
    if src.distribution == "many_big":
        return dist_many_big(config.m, config.n, mu)
    return validate_profile(src.profile, config.m, config.n)


def _build_matrix(config: ExperimentConfig, mu: Optional[float]) -> _TestMatrix:
    src = config.matrix
    if src is None:
        return _TestMatrix(None, None, float(mu), None)
    if src.kind == "file":
        from .io import read_matrix_csv

        Q = read_matrix_csv(src.path)
        if Q.shape != (config.m, config.n):
            raise ConfigError(f"matrix file is {Q.shape[0]}x{Q.shape[1]}, "
                              f"config says {config.m}x{config.n}")
        prof = leverage_scores(Q)
    else:
        prof = _target_profile(config, mu)
        Q, _ = generate_from_leverage(prof)
        if config.recompute_leverage:
            prof = leverage_scores(Q)
    lam = projected_leverage_norm(Q) if BoundId.B2 in config.bounds else None
    return _TestMatrix(Q, prof, prof.mu, lam)


def run_trial(Q: np.ndarray, c: int, method: Method, stream: RngStream,
              profile=None, grid_index: int = 0, trial_index: int = 0) -> TrialRecord:
    out = sample(method, Q, c, stream, profile=profile)
    kappa = condition_number(out.B) if out.realized_c >= Q.shape[1] else None
    return TrialRecord(grid_index, trial_index, method, out.realized_c, kappa is None, kappa)


def _run_block(Q, c, method, seed, grid_index, runs, profile) -> list[TrialRecord]:
    base = RngStream(seed)
    return [
        run_trial(Q, c, method, base.child(grid_index, t, method.number), profile,
                  grid_index, t)
        for t in range(runs)
    ]


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None) -> ExperimentResult:
    """Run every (grid point, sampler) block of trials and evaluate the bounds.

    Trial ``t`` of sampler ``s`` at grid index ``g`` draws from the stream
    ``(seed, g, t, s)``, so results do not depend on ``workers``. ``workers``
    of ``None`` or 1 runs serially; 0 uses all CPUs.
    """
    config.validate()
    grid = config.grid
    c_sweep = config.sweep == "c"

    if c_sweep:
        shared = _build_matrix(config, config.mu)
        mats = [shared] * len(grid)
    else:
        mats = [_build_matrix(config, mu) for mu in grid]

    blocks = []
    for gi, value in enumerate(grid):
        c = int(value) if c_sweep else int(config.c)
        tm = mats[gi]
        for s in config.samplers:
            blocks.append((tm.Q, c, s, config.seed, gi, config.runs, tm.profile))

    if workers == 0:
        workers = os.cpu_count() or 1
    if workers and workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda b: _run_block(*b), blocks))
    else:
        chunks = [_run_block(*b) for b in blocks]
    trials = sorted((t for ch in chunks for t in ch),
                    key=lambda t: (t.grid_index, t.trial_index, t.sampler.number))

    curves = {}
    for bid in config.bounds:
        if c_sweep:
            tm = mats[0]
            curves[bid] = evaluate_bound_curve(bid, config.m, config.n, [int(v) for v in grid],
                                               tm.mu, config.delta, lam=tm.lam)
        else:
            mus = [tm.mu for tm in mats]
            lams = [tm.lam for tm in mats]
            curves[bid] = evaluate_bound_curve(bid, config.m, config.n, int(config.c), mus,
                                               config.delta, lam=lams)
    return ExperimentResult(config, config.sweep, grid, trials, curves,
                            config.ci_level, config.ci_method)


def admissible_pairs(result: ExperimentResult) -> list[tuple[BoundId, Method]]:
    """(bound, sampler) pairs in the result where the bound is stated for the sampler."""
    return [(b, s) for b in result.bound_curves for s in result.samplers()
            if s.number in ADMISSIBLE_SAMPLERS[b]]

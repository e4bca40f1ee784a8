"""Probabilistic upper bounds on the condition number of a row-sampled matrix.

Every bound has the form: with probability at least ``1 - delta`` the sampled
matrix has full column rank and ``kappa(SQ) <= sqrt((1 + eps) / (1 - eps))``.
The functions here go from a target ``delta`` to the smallest admissible
``eps``, either in closed form or by bisection on ``delta(eps)``.

Bound identifiers:

====  ==========================================  =====================
id    form                                        samplers covered
====  ==========================================  =====================
B1    matrix Chernoff in the coherence             1, 2, 3
B2    matrix Bernstein in ``||Q^T L Q||_2``        1
B3    coherence, Monte Carlo product (two-norm)    2
B4    coherence, noncommutative Bernstein          2
B5    coherence, Monte Carlo product (Frobenius)   2
B6    coherence, Bernstein for Bernoulli           3
====  ==========================================  =====================
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

EPS_LO = 1e-15
EPS_HI = 1.0 - 1e-15
BISECT_TOL = 1e-12
BISECT_MAXITER = 200
EDGE_EPS = 1.0 - 1e-12


class BoundId(str, enum.Enum):
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"
    B4 = "B4"
    B5 = "B5"
    B6 = "B6"

    @classmethod
    def parse(cls, value) -> "BoundId":
        if isinstance(value, cls):
            return value
        key = str(value).strip()
        if key in _ALIASES:
            return _ALIASES[key]
        try:
            return cls(key.upper())
        except ValueError:
            raise ValueError(f"unknown bound id {value!r}") from None


_ALIASES = {
    "1": BoundId.B1, "chernoff": BoundId.B1, "B1_Chernoff": BoundId.B1,
    "2": BoundId.B2, "bernstein": BoundId.B2, "B2_Bernstein": BoundId.B2,
    "3": BoundId.B3, "weak_coherence": BoundId.B3, "B3_WeakCoherence": BoundId.B3,
    "4": BoundId.B4, "weak_bernstein": BoundId.B4, "B4_WeakBernstein": BoundId.B4,
    "5": BoundId.B5, "weak_frobenius": BoundId.B5, "B5_WeakFrobenius": BoundId.B5,
    "6": BoundId.B6, "weak_bernoulli": BoundId.B6, "B6_WeakBernoulli": BoundId.B6,
}

#: sampling method numbers each bound is stated for
ADMISSIBLE_SAMPLERS = {
    BoundId.B1: frozenset({1, 2, 3}),
    BoundId.B2: frozenset({1}),
    BoundId.B3: frozenset({2}),
    BoundId.B4: frozenset({2}),
    BoundId.B5: frozenset({2}),
    BoundId.B6: frozenset({3}),
}


@dataclass(frozen=True)
class BoundQuery:
    m: int
    n: int
    mu: float
    c: int
    delta: float
    lam: Optional[float] = None
    gamma: Optional[float] = None

    def __post_init__(self):
        if not self.m >= self.c >= self.n >= 1:
            raise ValueError(f"need m >= c >= n >= 1, got m={self.m}, c={self.c}, n={self.n}")
        if not (self.n / self.m - 1e-12 <= self.mu <= 1.0 + 1e-12):
            raise ValueError(f"mu={self.mu!r} outside [n/m, 1]")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta!r}")
        if self.lam is not None and not (
            self.mu**2 - 1e-12 <= self.lam <= self.mu + 1e-12
        ):
            raise ValueError(f"lambda={self.lam!r} outside [mu^2, mu]")
        if self.gamma is not None and not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma!r}")


@dataclass(frozen=True)
class BoundPoint:
    applicable: bool
    epsilon: Optional[float] = None
    kappa_bound: Optional[float] = None

    @classmethod
    def from_epsilon(cls, eps: float) -> "BoundPoint":
        if 0.0 < eps < 1.0:
            return cls(True, eps, kappa_from_epsilon(eps))
        return cls(False)


NOT_APPLICABLE = BoundPoint(False)


def kappa_from_epsilon(epsilon: float) -> float:
    """``sqrt((1 + eps) / (1 - eps))``, the common conclusion of all bounds."""
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon!r}")
    return math.sqrt((1.0 + epsilon) / (1.0 - epsilon))


def bisect_decreasing(g: Callable[[float], float], level: float,
                      lo: float = EPS_LO, hi: float = EPS_HI,
                      tol: float = BISECT_TOL, maxiter: int = BISECT_MAXITER) -> float:
    """Smallest ``x`` in ``[lo, hi]`` with ``g(x) <= level`` for nonincreasing ``g``.

    Assumes ``g(hi) <= level``. Returns the right end of the final bracket, so
    the returned point always satisfies the inequality.
    """
    if g(lo) <= level:
        return lo
    for _ in range(maxiter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) <= level:
            hi = mid
        else:
            lo = mid
    return hi


# -- B1: matrix Chernoff ----------------------------------------------------

def log_f(x: float) -> float:
    """``log(e^x (1 + x)^-(1 + x))`` for ``x >= -1``; continuous at ``x = -1``."""
    if x == -1.0:
        return -1.0
    return x - (1.0 + x) * math.log1p(x)


def log_chernoff_delta(epsilon: float, q: BoundQuery) -> float:
    k = q.c / (q.m * q.mu)
    return math.log(q.n) + np.logaddexp(k * log_f(-epsilon), k * log_f(epsilon))


def chernoff_delta(epsilon: float, q: BoundQuery) -> float:
    """``n (f(-eps)^(c/(m mu)) + f(eps)^(c/(m mu)))`` with ``f(x) = e^x (1+x)^-(1+x)``."""
    return math.exp(log_chernoff_delta(epsilon, q))


def invert_bound_1(q: BoundQuery) -> BoundPoint:
    log_target = math.log(q.delta)
    if log_chernoff_delta(EDGE_EPS, q) > log_target:
        return NOT_APPLICABLE
    eps = bisect_decreasing(lambda e: log_chernoff_delta(e, q), log_target)
    return BoundPoint.from_epsilon(eps)


# -- B2: matrix Bernstein with the projected leverage norm ------------------

def bernstein_delta(epsilon: float, q: BoundQuery) -> float:
    if q.lam is None:
        raise ValueError("bound B2 needs lam = ||Q^T L Q||_2")
    expo = 1.5 * q.c * epsilon**2 / (q.m * (3.0 * q.lam + epsilon * q.mu))
    return 2.0 * q.n * math.exp(-expo)


def bernstein_epsilon(q: BoundQuery) -> float:
    """Positive root of ``3 c e^2 - 2 L0 m mu e - 6 L0 m lam = 0``, ``L0 = ln(2n/delta)``."""
    if q.lam is None:
        raise ValueError("bound B2 needs lam = ||Q^T L Q||_2")
    L0 = math.log(2.0 * q.n / q.delta)
    a = L0 * q.m * q.mu
    return (a + math.sqrt(a * a + 18.0 * q.c * L0 * q.m * q.lam)) / (3.0 * q.c)


def invert_bound_2(q: BoundQuery) -> BoundPoint:
    return BoundPoint.from_epsilon(bernstein_epsilon(q))


def invert_bound_2_bisect(q: BoundQuery) -> BoundPoint:
    """Bisection counterpart of :func:`invert_bound_2`, for cross-checking."""
    log_target = math.log(q.delta)

    def log_delta(e):
        return math.log(2.0 * q.n) - 1.5 * q.c * e**2 / (q.m * (3.0 * q.lam + e * q.mu))

    if log_delta(EDGE_EPS) > log_target:
        return NOT_APPLICABLE
    return BoundPoint.from_epsilon(bisect_decreasing(log_delta, log_target))


# -- B3: weaker coherence bound (two-norm matrix product) -------------------

def weak_coherence_sample_size(epsilon: float, q: BoundQuery) -> float:
    """``zeta ln(zeta / sqrt(delta))`` with ``zeta = 96 m mu / eps^2``."""
    zeta = 96.0 * q.m * q.mu / epsilon**2
    return zeta * (math.log(zeta) - 0.5 * math.log(q.delta))


def invert_bound_3(q: BoundQuery) -> BoundPoint:
    if weak_coherence_sample_size(EDGE_EPS, q) > q.c:
        return NOT_APPLICABLE
    eps = bisect_decreasing(lambda e: weak_coherence_sample_size(e, q), q.c)
    return BoundPoint.from_epsilon(eps)


# -- B4, B5, B6: closed forms ------------------------------------------------

def _rho(q: BoundQuery) -> float:
    return (2.0 / 3.0) * math.log(2.0 * q.n / q.delta)


def bound_4_epsilon(q: BoundQuery) -> BoundPoint:
    rho = _rho(q)
    mum = q.mu * q.m
    eps = mum / (2.0 * q.c) * (rho + math.sqrt(12.0 * q.c * rho / mum + rho * rho))
    return BoundPoint.from_epsilon(eps)


def bound_5_epsilon(q: BoundQuery) -> BoundPoint:
    eps = (math.sqrt(q.m * q.n * q.mu / q.c)
           + q.m * q.mu * math.sqrt(8.0 * math.log(1.0 / q.delta) / q.c))
    return BoundPoint.from_epsilon(eps)


def bound_6_epsilon(q: BoundQuery) -> BoundPoint:
    gamma = q.gamma
    if gamma is None or not 0.0 < gamma < 1.0:
        raise ValueError(f"bound B6 needs gamma in (0, 1), got {gamma!r}")
    rho = _rho(q)
    ratio = (1.0 - gamma) / gamma
    phi = 1.0 if gamma >= 1.0 - gamma else ratio
    eps = 0.5 * q.mu * (phi * rho + math.sqrt(ratio * 12.0 * q.m * rho + (phi * rho) ** 2))
    return BoundPoint.from_epsilon(eps)


_EVALUATORS = {
    BoundId.B1: invert_bound_1,
    BoundId.B2: invert_bound_2,
    BoundId.B3: invert_bound_3,
    BoundId.B4: bound_4_epsilon,
    BoundId.B5: bound_5_epsilon,
    BoundId.B6: bound_6_epsilon,
}


def evaluate_bound(bound_id, q: BoundQuery) -> BoundPoint:
    return _EVALUATORS[BoundId.parse(bound_id)](q)


def _is_vector(x) -> bool:
    return isinstance(x, (list, tuple, np.ndarray))


def evaluate_bound_curve(bound_id, m: int, n: int, c, mu, delta: float,
                         lam=None, gamma=None) -> list[BoundPoint]:
    """Evaluate a bound along a sweep of ``c`` or of ``mu`` (exactly one is a vector).

    For B6 the Bernoulli keep-fraction defaults to ``gamma = c / m``; points
    where that equals 1 are outside the bound's hypotheses and come back
    inapplicable. ``lam`` may be a scalar or a vector aligned with a ``mu``
    sweep.
    """
    bid = BoundId.parse(bound_id)
    c_vec, mu_vec = _is_vector(c), _is_vector(mu)
    if c_vec == mu_vec:
        raise ValueError("exactly one of c and mu must be a vector")
    size = len(c) if c_vec else len(mu)
    cs = list(c) if c_vec else [c] * size
    mus = list(mu) if mu_vec else [mu] * size
    lams = list(lam) if _is_vector(lam) else [lam] * size
    if len(lams) != size:
        raise ValueError("lam vector must match the sweep length")
    points = []
    for ci, mui, lami in zip(cs, mus, lams):
        g = gamma
        if bid is BoundId.B6 and g is None:
            g = int(ci) / m
            if g >= 1.0:
                points.append(NOT_APPLICABLE)
                continue
        q = BoundQuery(m, n, float(mui), int(ci), delta,
                       lam=None if lami is None else float(lami),
                       gamma=g if bid is BoundId.B6 else None)
        points.append(_EVALUATORS[bid](q))
    return points

"""Synthetic leverage-score profiles and validation of user-supplied ones."""

from __future__ import annotations

import math

import numpy as np

from .linalg import LeverageProfile

ENTRY_TOL = 1e-12
SUM_RTOL = 1e-10


class ProfileError(ValueError):
    """A leverage profile violates one or more invariants.

    ``violations`` lists one message per failed check, each with the measured
    value.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("invalid leverage profile: " + "; ".join(self.violations))


def _check_mu(m: int, n: int, mu: float) -> None:
    if not (isinstance(m, (int, np.integer)) and isinstance(n, (int, np.integer))):
        raise TypeError("m and n must be integers")
    if not m >= n >= 1:
        raise ValueError(f"need m >= n >= 1, got m={m}, n={n}")
    lo = n / m
    # n/m is not exactly representable in general; admit a one-ulp-ish slack
    if not (lo - ENTRY_TOL <= mu <= 1.0):
        raise ValueError(f"coherence mu={mu!r} outside [n/m, 1] = [{lo!r}, 1]")


def dist_one_big(m: int, n: int, mu: float) -> LeverageProfile:
    """One score equal to ``mu``, the other ``m - 1`` all equal.

    >>> dist_one_big(5, 2, 0.6).scores.tolist()
    [0.6, 0.35, 0.35, 0.35, 0.35]
    """
    _check_mu(m, n, mu)
    scores = np.empty(m)
    scores[0] = mu
    if m > 1:
        scores[1:] = (n - mu) / (m - 1)
    return LeverageProfile(scores, n)


def dist_many_big(m: int, n: int, mu: float) -> LeverageProfile:
    """As many scores equal to ``mu`` as possible, at most one remainder, then zeros.

    This maximises the number of zero rows attainable at coherence ``mu``.
    The output always has length ``m``.
    """
    _check_mu(m, n, mu)
    m_tilde = min(math.floor(n / mu), m)
    scores = np.zeros(m)
    scores[:m_tilde] = mu
    if m_tilde < m:
        rest = n - m_tilde * mu
        if rest < 0.0:
            if rest < -ENTRY_TOL:
                raise AssertionError(f"negative remainder {rest!r}")
            rest = 0.0
        scores[m_tilde] = rest
    return LeverageProfile(scores, n)


def validate_profile(scores, m: int, n: int) -> LeverageProfile:
    """Check a user profile and return it as a :class:`LeverageProfile`.

    Accepts iff the length is ``m``, every entry lies in
    ``[-1e-12, 1 + 1e-12]`` and ``|sum - n| <= 1e-10 * n``. Negative
    round-off is clamped to zero. Raises :class:`ProfileError` listing every
    failed check.
    """
    arr = np.asarray(scores, dtype=np.float64).reshape(-1)
    problems = []
    if not m >= n >= 1:
        problems.append(f"need m >= n >= 1, got m={m}, n={n}")
    if arr.size != m:
        problems.append(f"length = {arr.size} != m = {m}")
    if not np.all(np.isfinite(arr)):
        problems.append("non-finite entries present")
    else:
        if arr.size and arr.min() < -ENTRY_TOL:
            problems.append(f"entry < 0: min = {arr.min()!r}")
        if arr.size and arr.max() > 1.0 + ENTRY_TOL:
            problems.append(f"entry > 1: max = {arr.max()!r}")
        total = float(arr.sum())
        if abs(total - n) > SUM_RTOL * max(n, 1):
            problems.append(f"sum = {total!r} != n = {n}")
    if problems:
        raise ProfileError(problems)
    return LeverageProfile(np.clip(arr, 0.0, None), n)

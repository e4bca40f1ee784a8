"""Deterministic test matrices with prescribed leverage scores.

Starting from a matrix whose last ``n`` rows form ``I_n`` (all other rows
zero), ``m - 1`` plane rotations acting on pairs of rows redistribute the
squared row norms until every row carries its target score. Each rotation
fixes one row; the last row is then determined because the scores sum to
``n``. Rotation angles use the cancellation-free tangent formula for a
2x2 Gram block (Dhillon, Heath, Sustik & Tropp, 2005).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import validate_profile
from .linalg import LeverageProfile, as_matrix, orthonormality_defect

REACH_TOL = 1e-12


class UnreachableTargetError(ValueError):
    """The requested squared norm lies outside what a rotation of the pair can reach."""


@dataclass
class GenerationTrace:
    rotation_count: int = 0
    steps: list[tuple[int, int, float]] = field(default_factory=list)
    final_defect: float = float("nan")


def _rotation(x: float, y: float, z: float, target: float) -> tuple[float, float]:
    """Cosine/sine of the rotation giving the first row squared norm ``target``.

    ``x``, ``y`` are the squared norms of the designated row and its partner,
    ``z`` their inner product. With ``t = s / c`` the condition is the
    quadratic ``t^2 (y - d) - 2 t z + (x - d) = 0``; the root is taken in the
    form that avoids subtractive cancellation.
    """
    a = x - target
    b = y - target
    disc = z * z - a * b
    if disc < 0.0:
        # distance of target outside [lambda_min, lambda_max] of [[x, z], [z, y]]
        half = 0.5 * (x - y)
        radius = math.hypot(half, z)
        mid = 0.5 * (x + y)
        gap = abs(target - mid) - radius
        if gap > REACH_TOL * max(1.0, abs(mid)):
            raise UnreachableTargetError(
                f"target {target!r} outside achievable interval "
                f"[{mid - radius!r}, {mid + radius!r}]"
            )
        disc = 0.0
    denom = z + math.copysign(math.sqrt(disc), z)
    if denom == 0.0:
        # orthogonal rows, target at an endpoint: keep or swap, whichever is nearer
        return (1.0, 0.0) if abs(a) <= abs(b) else (0.0, 1.0)
    t = a / denom
    c = 1.0 / math.sqrt(1.0 + t * t)
    return c, c * t


def rotate_rows_to_norm(Q, i: int, j: int, target: float, which: str = "i") -> np.ndarray:
    """Rotate rows ``i`` and ``j`` so that row ``which`` has squared norm ``target``.

    Returns a new array; the combined squared norm of the two rows and the
    column orthonormality of ``Q`` are preserved.
    """
    Q = as_matrix(Q).copy()
    _rotate_inplace(Q, i, j, target, which)
    return Q


def _rotate_inplace(Q: np.ndarray, i: int, j: int, target: float, which: str) -> float:
    if i == j:
        raise ValueError("rows i and j must differ")
    if which == "i":
        p, q = i, j
    elif which == "j":
        p, q = j, i
    else:
        raise ValueError(f"which must be 'i' or 'j', got {which!r}")
    rp = Q[p].copy()
    rq = Q[q].copy()
    x = float(rp @ rp)
    y = float(rq @ rq)
    z = float(rp @ rq)
    c, s = _rotation(x, y, z, target)
    Q[p] = c * rp - s * rq
    Q[q] = s * rp + c * rq
    return math.atan2(s, c)


def generate_from_leverage(profile, n: int | None = None, record_steps: bool = False):
    """Build an ``m x n`` matrix with orthonormal columns and the given leverage scores.

    Parameters
    ----------
    profile : LeverageProfile or array_like
        Target scores. Plain arrays need ``n`` and are validated first.
    record_steps : bool
        Keep ``(i, j, angle)`` for every rotation in the trace.

    Returns
    -------
    Q : ndarray, shape (m, n)
    trace : GenerationTrace
    """
    if isinstance(profile, LeverageProfile):
        n = profile.n if n is None else n
        lev = validate_profile(profile.scores, profile.m, n).scores
    else:
        if n is None:
            raise TypeError("n is required when profile is a plain array")
        lev = validate_profile(profile, len(np.asarray(profile).reshape(-1)), n).scores
    m = lev.size
    trace = GenerationTrace()
    if m == n:
        # every score is 1; the m - 1 rotations are all the identity
        trace.rotation_count = m - 1
        trace.final_defect = 0.0
        return np.eye(n), trace

    order = np.argsort(lev, kind="stable")
    ls = lev[order]
    Q = np.zeros((m, n))
    Q[m - n:, :] = np.eye(n)

    # 0-based versions of the pointers m-n and m-n+1
    i = m - n - 1
    j = m - n
    for _ in range(m - 1):
        if i < 0:
            # low rows exhausted: pair row j with the next untouched unit row
            step = (j, j + 1, _rotate_inplace(Q, j, j + 1, ls[j], "i"))
            j += 1
        elif j > m - 1:
            step = (i - 1, i, _rotate_inplace(Q, i - 1, i, ls[i], "j"))
            i -= 1
        else:
            xi = float(Q[i] @ Q[i])
            xj = float(Q[j] @ Q[j])
            lo, hi = min(xi, xj) - REACH_TOL, max(xi, xj) + REACH_TOL
            i_ok = lo <= ls[i] <= hi
            j_ok = lo <= ls[j] <= hi
            if i_ok and j_ok:
                # a tie takes the j-branch
                take_i = abs(ls[i] - xi) < abs(ls[j] - xj)
            else:
                take_i = i_ok
            if take_i:
                step = (i, j, _rotate_inplace(Q, i, j, ls[i], "i"))
                i -= 1
            else:
                step = (i, j, _rotate_inplace(Q, i, j, ls[j], "j"))
                j += 1
        trace.rotation_count += 1
        if record_steps:
            trace.steps.append(step)

    out = np.empty_like(Q)
    out[order] = Q
    trace.final_defect = orthonormality_defect(out)
    return out, trace

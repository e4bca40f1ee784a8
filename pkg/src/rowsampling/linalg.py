"""Dense linear-algebra primitives for matrices with orthonormal columns.

Everything here works on 2-D float64 numpy arrays. Leverage scores are the
squared row norms of an orthonormal basis; the coherence is their maximum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

ORTHONORMALITY_TOL = 1e-8


class OrthonormalityError(ValueError):
    """Raised when a matrix expected to have orthonormal columns does not."""

    def __init__(self, defect: float, tol: float = ORTHONORMALITY_TOL):
        self.defect = defect
        self.tol = tol
        super().__init__(
            f"columns are not orthonormal: ||Q^T Q - I||_2 = {defect:.3e} > {tol:.1e}"
        )


def as_matrix(M) -> np.ndarray:
    """Coerce ``M`` to a finite 2-D float64 array, raising ``ValueError`` otherwise."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    if A.shape[1] < 1:
        raise ValueError("matrix must have at least one column")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains NaN or Inf entries")
    return A


@dataclass(frozen=True)
class LeverageProfile:
    """A vector of leverage scores for an ``m x n`` orthonormal basis.

    Construct through :func:`leverage_scores` or
    :func:`rowsampling.distributions.validate_profile`; the constructor does
    not check the invariants itself.
    """

    scores: np.ndarray
    n: int
    m: int = field(init=False)

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "m", scores.size)

    @property
    def mu(self) -> float:
        """Coherence, the largest leverage score."""
        return float(np.max(self.scores))

    def __len__(self) -> int:
        return self.m

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.scores, dtype=dtype)


def orthonormality_defect(Q) -> float:
    """Return ``||Q^T Q - I_n||_2``."""
    Q = as_matrix(Q)
    m, n = Q.shape
    if m < n:
        raise ValueError(f"need rows >= cols, got {m}x{n}")
    G = Q.T @ Q
    G[np.diag_indices(n)] -= 1.0
    return float(np.linalg.norm(G, 2))


def _check_orthonormal(Q: np.ndarray, tol: float) -> None:
    defect = orthonormality_defect(Q)
    if defect > tol:
        raise OrthonormalityError(defect, tol)


def leverage_scores(Q, check: bool = True, tol: float = ORTHONORMALITY_TOL) -> LeverageProfile:
    """Squared Euclidean row norms of ``Q``.

    Parameters
    ----------
    Q : array_like, shape (m, n)
        Matrix with orthonormal columns, ``m >= n``.
    check : bool
        Verify ``||Q^T Q - I|| <= tol`` first and raise
        :class:`OrthonormalityError` if it fails.
    """
    Q = as_matrix(Q)
    m, n = Q.shape
    if m < n:
        raise ValueError(f"need rows >= cols, got {m}x{n}")
    if check:
        _check_orthonormal(Q, tol)
    return LeverageProfile(np.einsum("ij,ij->i", Q, Q), n)


def coherence(Q, check: bool = True, tol: float = ORTHONORMALITY_TOL) -> float:
    return leverage_scores(Q, check=check, tol=tol).mu


def default_rank_tol(sigma: np.ndarray, shape: tuple[int, int]) -> float:
    if sigma.size == 0:
        return 0.0
    return max(shape) * np.finfo(np.float64).eps * float(sigma[0])


def numerical_rank(M, tol: Optional[float] = None) -> int:
    """Number of singular values of ``M`` strictly greater than ``tol``.

    The default tolerance is ``max(rows, cols) * eps * sigma_max``.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {M.shape}")
    if M.size == 0:
        return 0
    sigma = np.linalg.svd(M, compute_uv=False)
    if tol is None:
        tol = default_rank_tol(sigma, M.shape)
    return int(np.count_nonzero(sigma > tol))


def condition_number(M, rank_tol: Optional[float] = None) -> Optional[float]:
    """Two-norm condition number ``sigma_max / sigma_min`` of a tall matrix.

    Returns ``None`` when ``M`` is numerically rank deficient (including the
    case of fewer rows than columns, which can arise from Bernoulli sampling).
    Rank deficiency is an expected outcome in sampling experiments and is
    therefore reported rather than raised.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix with columns, got shape {M.shape}")
    rows, cols = M.shape
    if rows < cols:
        return None
    sigma = np.linalg.svd(M, compute_uv=False)
    tol = default_rank_tol(sigma, M.shape) if rank_tol is None else rank_tol
    if np.count_nonzero(sigma > tol) < cols:
        return None
    return float(sigma[0] / sigma[-1])


def projected_leverage_norm(Q, check: bool = True, tol: float = ORTHONORMALITY_TOL) -> float:
    """Two-norm of ``Q^T L Q`` with ``L = diag(leverage_scores(Q))``."""
    Q = as_matrix(Q)
    lev = leverage_scores(Q, check=check, tol=tol).scores
    # Q^T L Q = W^T W with W = sqrt(L) Q, so the norm is sigma_max(W)^2
    W = np.sqrt(lev)[:, None] * Q
    return float(np.linalg.norm(W, 2) ** 2)

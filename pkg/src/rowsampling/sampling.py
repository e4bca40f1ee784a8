"""Randomized row sampling of a matrix with orthonormal columns.

Each sampler returns the sampled matrix ``B = sqrt(m/c) * Q[s, :]`` directly,
never forming the sampling matrix. Only selected rows are kept, so Bernoulli
sampling yields a variable number of rows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .linalg import LeverageProfile


class Method(str, enum.Enum):
    WITHOUT_REPLACEMENT = "without_replacement"
    WITH_REPLACEMENT = "with_replacement"
    BERNOULLI = "bernoulli"
    LEVERAGE = "leverage"

    @property
    def number(self) -> int:
        return _METHOD_NUMBERS[self]

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        if isinstance(value, int) or (isinstance(value, str) and value.isdigit()):
            for meth, num in _METHOD_NUMBERS.items():
                if num == int(value):
                    return meth
        try:
            return cls(str(value).lower().replace("-", "_"))
        except ValueError:
            raise ValueError(f"unknown sampling method {value!r}") from None


_METHOD_NUMBERS = {
    Method.WITHOUT_REPLACEMENT: 1,
    Method.WITH_REPLACEMENT: 2,
    Method.BERNOULLI: 3,
    Method.LEVERAGE: 4,
}


@dataclass(frozen=True)
class RngStream:
    """Seed plus a stream identity.

    The generator for ``(seed, key)`` is derived with numpy's ``SeedSequence``
    spawn keys, so every identity gets an independent, reproducible stream
    regardless of the order in which streams are consumed.
    """

    seed: int
    key: tuple[int, ...] = ()

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(int(k) for k in key))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=int(self.seed), spawn_key=self.key)
        return np.random.Generator(np.random.PCG64(seq))


@dataclass
class SampleOutcome:
    B: np.ndarray
    indices: np.ndarray  # 0-based
    nominal_c: int
    method: Method

    @property
    def realized_c(self) -> int:
        return int(self.indices.size)


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _check_c(c: int, m: int) -> None:
    if not 1 <= c <= m:
        raise ValueError(f"c must satisfy 1 <= c <= m = {m}, got {c}")


def _outcome(Q: np.ndarray, s: np.ndarray, c: int, method: Method) -> SampleOutcome:
    m = Q.shape[0]
    s = np.asarray(s, dtype=np.intp)
    return SampleOutcome(np.sqrt(m / c) * Q[s, :], s, c, method)


def sample_without_replacement(Q, c: int, rng) -> SampleOutcome:
    """First ``c`` entries of a uniformly random permutation of the rows."""
    Q = np.asarray(Q, dtype=np.float64)
    m = Q.shape[0]
    _check_c(c, m)
    # Generator.permutation is a Fisher-Yates shuffle
    s = _as_generator(rng).permutation(m)[:c]
    return _outcome(Q, s, c, Method.WITHOUT_REPLACEMENT)


def sample_with_replacement(Q, c: int, rng) -> SampleOutcome:
    """``c`` i.i.d. uniform row indices."""
    Q = np.asarray(Q, dtype=np.float64)
    m = Q.shape[0]
    _check_c(c, m)
    s = _as_generator(rng).integers(0, m, size=c)
    return _outcome(Q, s, c, Method.WITH_REPLACEMENT)


def sample_bernoulli(Q, c: int, rng) -> SampleOutcome:
    """Keep each row independently with probability ``c/m``.

    Kept rows are scaled by ``sqrt(m/c)`` with the nominal ``c``.
    """
    Q = np.asarray(Q, dtype=np.float64)
    m = Q.shape[0]
    _check_c(c, m)
    keep = _as_generator(rng).random(m) < c / m
    return _outcome(Q, np.flatnonzero(keep), c, Method.BERNOULLI)


def categorical_inverse_cdf(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Map uniforms ``u`` in [0, 1) to category indices by inverse CDF.

    The last bucket absorbs round-off in the cumulative sum, and buckets with
    zero probability can never be returned.
    """
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, np.flatnonzero(probs > 0)[-1])


def sample_proportional_to_leverage(Q, c: int, profile, rng, rtol: float = 1e-8) -> SampleOutcome:
    """``c`` i.i.d. indices with probabilities ``l_i / n``."""
    Q = np.asarray(Q, dtype=np.float64)
    m, n = Q.shape
    _check_c(c, m)
    lev = profile.scores if isinstance(profile, LeverageProfile) else np.asarray(profile, float)
    if lev.size != m:
        raise ValueError(f"profile length {lev.size} != m = {m}")
    if np.any(lev < 0):
        raise ValueError("leverage scores must be nonnegative")
    total = float(lev.sum())
    if abs(total - n) > rtol * n:
        raise ValueError(f"leverage scores sum to {total!r}, expected n = {n}")
    u = _as_generator(rng).random(c)
    s = categorical_inverse_cdf(lev / n, u)
    return _outcome(Q, s, c, Method.LEVERAGE)


def sample(method, Q, c: int, rng, profile=None) -> SampleOutcome:
    """Dispatch to one of the four samplers by :class:`Method`."""
    method = Method.parse(method)
    if method is Method.WITHOUT_REPLACEMENT:
        return sample_without_replacement(Q, c, rng)
    if method is Method.WITH_REPLACEMENT:
        return sample_with_replacement(Q, c, rng)
    if method is Method.BERNOULLI:
        return sample_bernoulli(Q, c, rng)
    if profile is None:
        raise ValueError("leverage sampling needs a leverage profile")
    return sample_proportional_to_leverage(Q, c, profile, rng)

import itertools
from collections import Counter

import numpy as np
import pytest
from scipy import stats

from conftest import random_orthonormal
from rowsampling import condition_number
from rowsampling.linalg import LeverageProfile
from rowsampling.sampling import (
    Method,
    RngStream,
    categorical_inverse_cdf,
    sample,
    sample_bernoulli,
    sample_proportional_to_leverage,
    sample_with_replacement,
    sample_without_replacement,
)

Q3 = np.vstack([np.eye(2), np.zeros((1, 2))])


def chi2_ok(counts, probs, level=0.99):
    counts = np.asarray(counts, dtype=float)
    expected = counts.sum() * np.asarray(probs, dtype=float)
    statistic = np.sum((counts - expected) ** 2 / expected)
    return statistic <= stats.chi2.ppf(level, len(counts) - 1)


class TestRngStream:
    def test_reproducible(self):
        a = RngStream(5, (1, 2, 3)).generator().random(4)
        b = RngStream(5, (1, 2, 3)).generator().random(4)
        np.testing.assert_array_equal(a, b)

    def test_identities_differ(self):
        a = RngStream(5, (1, 2, 3)).generator().random(4)
        b = RngStream(5, (1, 3, 2)).generator().random(4)
        assert not np.array_equal(a, b)

    def test_child(self):
        assert RngStream(1).child(4, 5) == RngStream(1, (4, 5))


class TestWithoutReplacement:
    def test_full_sample_is_permutation(self, rng):
        Q = random_orthonormal(rng, 20, 3)
        out = sample_without_replacement(Q, 20, RngStream(3))
        assert sorted(out.indices.tolist()) == list(range(20))
        np.testing.assert_array_equal(out.B, Q[out.indices])
        assert condition_number(out.B) == pytest.approx(condition_number(Q), rel=1e-12)

    def test_subset_uniformity(self):
        counts = Counter()
        for t in range(40_000):
            out = sample_without_replacement(Q3, 2, RngStream(1, (t,)))
            counts[frozenset(out.indices.tolist())] += 1
        pairs = [frozenset(p) for p in itertools.combinations(range(3), 2)]
        assert set(counts) == set(pairs)
        assert chi2_ok([counts[p] for p in pairs], [1 / 3] * 3)
        sd = np.sqrt(40_000 * (1 / 3) * (2 / 3))
        for p in pairs:
            assert abs(counts[p] - 40_000 / 3) <= 3 * sd

    def test_distinct(self, rng):
        for t in range(50):
            out = sample_without_replacement(np.ones((30, 1)) / np.sqrt(30), 12, RngStream(1, (t,)))
            assert len(set(out.indices.tolist())) == 12

    def test_deterministic(self):
        a = sample_without_replacement(Q3, 2, RngStream(9, (0, 1)))
        b = sample_without_replacement(Q3, 2, RngStream(9, (0, 1)))
        np.testing.assert_array_equal(a.indices, b.indices)

    @pytest.mark.parametrize("c", [0, 4])
    def test_rejects_c(self, c):
        with pytest.raises(ValueError):
            sample_without_replacement(Q3, c, RngStream(0))


class TestWithReplacement:
    def test_single_row(self):
        out = sample_with_replacement(np.array([[1.0, 2.0]]), 1, RngStream(0))
        np.testing.assert_array_equal(out.B, [[1.0, 2.0]])

    def test_uniform_indices(self):
        Q = np.full((10, 1), 10**-0.5)
        counts = np.zeros(10)
        gen = RngStream(23).generator()
        for _ in range(100_000):
            counts[sample_with_replacement(Q, 1, gen).indices[0]] += 1
        assert chi2_ok(counts, [0.1] * 10)

    def test_exactly_c(self, rng):
        Q = random_orthonormal(rng, 15, 2)
        for c in (1, 7, 15):
            assert sample_with_replacement(Q, c, RngStream(c)).realized_c == c


class TestBernoulli:
    def test_keep_all(self, rng):
        Q = random_orthonormal(rng, 12, 3)
        out = sample_bernoulli(Q, 12, RngStream(0))
        np.testing.assert_array_equal(out.B, Q)

    def test_mean_count(self):
        m, c, N = 100, 20, 10_000
        Q = np.full((m, 1), m**-0.5)
        counts = [sample_bernoulli(Q, c, RngStream(31, (t,))).realized_c for t in range(N)]
        sigma = np.sqrt(m * (c / m) * (1 - c / m))
        assert abs(np.mean(counts) - c) <= 3 * sigma / np.sqrt(N)

    def test_can_be_empty(self):
        Q = np.full((50, 1), 50**-0.5)
        outs = [sample_bernoulli(Q, 1, RngStream(2, (t,))) for t in range(200)]
        empty = [o for o in outs if o.realized_c == 0]
        assert empty
        assert empty[0].B.shape == (0, 1)

    def test_indices_increasing(self, rng):
        out = sample_bernoulli(random_orthonormal(rng, 40, 2), 20, RngStream(4))
        assert np.all(np.diff(out.indices) > 0)

    def test_nominal_scaling(self, rng):
        Q = random_orthonormal(rng, 40, 2)
        out = sample_bernoulli(Q, 10, RngStream(4))
        np.testing.assert_array_equal(out.B, np.sqrt(40 / 10) * Q[out.indices])


class TestLeverage:
    def test_never_zero_rows(self):
        gen = RngStream(5).generator()
        out = sample_proportional_to_leverage(Q3, 3, [1.0, 1.0, 0.0], gen)
        seen = np.concatenate([out.indices] + [
            sample_proportional_to_leverage(Q3, 3, [1.0, 1.0, 0.0], gen).indices
            for _ in range(999)
        ])
        assert 2 not in seen

    def test_categorical_frequencies(self):
        N = 10_000
        gen = RngStream(8).generator()
        idx = np.array([sample_proportional_to_leverage(Q3, 1, [1.0, 1.0, 0.0], gen).indices[0]
                        for _ in range(N)])
        sd = np.sqrt(N * 0.25)
        assert abs(np.sum(idx == 0) - N / 2) <= 3 * sd
        assert abs(np.sum(idx == 1) - N / 2) <= 3 * sd
        assert np.sum(idx == 2) == 0

    def test_uniform_profile_matches_uniform(self):
        Q = np.full((10, 1), 10**-0.5)
        prof = LeverageProfile(np.full(10, 0.1), 1)
        gen = RngStream(29).generator()
        counts = np.bincount(
            np.concatenate([sample_proportional_to_leverage(Q, 10, prof, gen).indices
                            for _ in range(10_000)]),
            minlength=10,
        )
        assert chi2_ok(counts, [0.1] * 10)

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            sample_proportional_to_leverage(Q3, 1, [1.0, 0.5, 0.0], RngStream(0))

    def test_inverse_cdf_clamps(self):
        probs = np.array([0.3, 0.0, 0.7, 0.0])
        u = np.array([0.0, 0.299999, 0.3, 0.9999999999999999])
        np.testing.assert_array_equal(categorical_inverse_cdf(probs, u), [0, 0, 2, 2])


@pytest.mark.parametrize("method", list(Method))
def test_scaling_is_exact(method, rng):
    Q = random_orthonormal(rng, 25, 3)
    prof = np.sum(Q**2, axis=1)
    out = sample(method, Q, 9, RngStream(77, (method.number,)), profile=prof)
    np.testing.assert_array_equal(out.B, np.sqrt(25 / 9) * Q[out.indices])
    assert out.method is method


@pytest.mark.parametrize("text,expected", [
    ("with-replacement", Method.WITH_REPLACEMENT), (3, Method.BERNOULLI),
    ("4", Method.LEVERAGE), ("without_replacement", Method.WITHOUT_REPLACEMENT),
])
def test_method_parse(text, expected):
    assert Method.parse(text) is expected


def test_method_parse_unknown():
    with pytest.raises(ValueError):
        Method.parse("stratified")

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from rowsampling.bounds import (
    ADMISSIBLE_SAMPLERS,
    BoundId,
    BoundPoint,
    BoundQuery,
    bernstein_delta,
    bisect_decreasing,
    bound_4_epsilon,
    bound_5_epsilon,
    bound_6_epsilon,
    chernoff_delta,
    evaluate_bound_curve,
    invert_bound_1,
    invert_bound_2,
    invert_bound_2_bisect,
    invert_bound_3,
    kappa_from_epsilon,
)

# Frozen from tests/oracles.py (50-digit mpmath); see test_frozen_values_match_oracle.
SMALL = dict(m=500, n=4, mu=0.016, c=200, delta=0.01)
LARGE = dict(m=10_000, n=4, mu=4e-4, c=10_000, delta=0.01)
CHERNOFF_DELTA_SMALL_HALF = 0.35384525321938414805
B1_EPS_SMALL = 0.76888974403414955746
B2_EPS_LARGE = 0.074024610251504943185
B3_EPS_LARGE = 0.59709927387251862382
B4_EPS_LARGE = 0.074024610251504943185
B4_KAPPA_LARGE = 1.0769793948625850673
B5_EPS_LARGE = 0.28278834070162342818
B5_KAPPA_LARGE = 1.3373769429333709051
B5_EPS_SMALL = 3.8335456420629556513
B6_EPS_LARGE_HALF = 0.14714979212414547431


def test_frozen_values_match_oracle():
    assert float(oracles.chernoff_delta(0.5, **{k: SMALL[k] for k in "mnc"}, mu=SMALL["mu"])) \
        == pytest.approx(CHERNOFF_DELTA_SMALL_HALF, rel=1e-15)
    assert float(oracles.bound1_eps(**SMALL)) == pytest.approx(B1_EPS_SMALL, rel=1e-15)
    assert float(oracles.bound2_eps(lam=4e-4, **LARGE)) == pytest.approx(B2_EPS_LARGE, rel=1e-15)
    assert float(oracles.bound3_eps(**LARGE)) == pytest.approx(B3_EPS_LARGE, rel=1e-15)
    assert float(oracles.bound4_eps(**LARGE)) == pytest.approx(B4_EPS_LARGE, rel=1e-15)
    assert float(oracles.bound5_eps(**LARGE)) == pytest.approx(B5_EPS_LARGE, rel=1e-15)
    assert float(oracles.bound6_eps(10_000, 4, 4e-4, 0.5, 0.01)) == pytest.approx(
        B6_EPS_LARGE_HALF, rel=1e-15)


class TestKappaFromEpsilon:
    @pytest.mark.parametrize("eps,expected", [(0.0, 1.0), (0.5, math.sqrt(3)), (0.96, 7.0)])
    def test_values(self, eps, expected):
        assert kappa_from_epsilon(eps) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("eps", [-0.1, 1.0, 1.5])
    def test_rejects(self, eps):
        with pytest.raises(ValueError):
            kappa_from_epsilon(eps)

    @given(st.floats(0, 0.999), st.floats(0, 0.999))
    def test_monotone(self, a, b):
        if a < b:
            assert kappa_from_epsilon(a) <= kappa_from_epsilon(b)


class TestQuery:
    def test_rejects_c_below_n(self):
        with pytest.raises(ValueError):
            BoundQuery(100, 4, 0.5, 3, 0.01)

    def test_rejects_mu(self):
        with pytest.raises(ValueError):
            BoundQuery(100, 4, 0.01, 10, 0.01)

    def test_rejects_lambda(self):
        with pytest.raises(ValueError):
            BoundQuery(100, 4, 0.5, 10, 0.01, lam=0.6)

    def test_parse_ids(self):
        assert BoundId.parse("b3") is BoundId.B3
        assert BoundId.parse("chernoff") is BoundId.B1
        assert BoundId.parse("B6_WeakBernoulli") is BoundId.B6
        with pytest.raises(ValueError):
            BoundId.parse("B7")

    def test_admissible_table(self):
        assert ADMISSIBLE_SAMPLERS[BoundId.B1] == {1, 2, 3}
        assert ADMISSIBLE_SAMPLERS[BoundId.B2] == {1}
        assert ADMISSIBLE_SAMPLERS[BoundId.B6] == {3}


class TestChernoff:
    def test_small_eps_limit(self):
        q = BoundQuery(**SMALL)
        assert chernoff_delta(1e-9, q) == pytest.approx(2 * 4, rel=1e-9)

    def test_unit_exponent(self):
        q = BoundQuery(m=100, n=2, mu=0.5, c=50, delta=0.1)
        eps = 0.3
        f = lambda x: math.exp(x) * (1 + x) ** (-(1 + x))
        assert chernoff_delta(eps, q) == pytest.approx(2 * (f(-eps) + f(eps)), rel=1e-14)

    def test_example_value(self):
        assert chernoff_delta(0.5, BoundQuery(**SMALL)) == pytest.approx(
            CHERNOFF_DELTA_SMALL_HALF, rel=1e-12)

    def test_edge_continuity(self):
        q = BoundQuery(100, 4, 1.0, 4, 0.01)
        assert chernoff_delta(1.0, q) == pytest.approx(float(oracles.chernoff_delta(1, 100, 4, 1.0, 4)),
                                                       rel=1e-13)

    def test_no_overflow_for_huge_exponent(self):
        q = BoundQuery(10**6, 1, 1e-6, 10**6, 0.01)  # c/(m mu) = 1e6
        assert chernoff_delta(0.5, q) == 0.0
        assert invert_bound_1(q).applicable

    def test_decreasing(self):
        q = BoundQuery(**SMALL)
        vals = [chernoff_delta(e, q) for e in np.linspace(0.01, 0.99, 50)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestInvertBound1:
    def test_example(self):
        pt = invert_bound_1(BoundQuery(**SMALL))
        assert pt.applicable
        assert pt.epsilon == pytest.approx(B1_EPS_SMALL, rel=1e-10)
        assert pt.epsilon == pytest.approx(0.77, abs=1e-3 * 10)

    def test_bracketing(self):
        q = BoundQuery(**SMALL)
        eps = invert_bound_1(q).epsilon
        assert chernoff_delta(eps, q) <= q.delta < chernoff_delta(eps - 1e-9, q)

    def test_inapplicable(self):
        # delta(1-) = n (e^-k + f(1)^k) with k = c/(m mu) = 0.04 is far above 0.01
        assert float(oracles.chernoff_delta(1, 100, 4, 1.0, 4)) > 0.01
        assert not invert_bound_1(BoundQuery(100, 4, 1.0, 4, 0.01)).applicable


class TestInvertBound2:
    def test_example(self):
        pt = invert_bound_2(BoundQuery(lam=4e-4, **LARGE))
        assert pt.epsilon == pytest.approx(B2_EPS_LARGE, rel=1e-10)

    def test_root_property(self):
        q = BoundQuery(lam=4e-4, **LARGE)
        eps = invert_bound_2(q).epsilon
        assert bernstein_delta(eps, q) == pytest.approx(q.delta, rel=1e-10)

    def test_doubling_c(self):
        q1 = BoundQuery(m=10_000, n=4, mu=4e-4, lam=4e-4, c=2_000, delta=0.01)
        q2 = BoundQuery(m=10_000, n=4, mu=4e-4, lam=4e-4, c=4_000, delta=0.01)
        assert invert_bound_2(q2).epsilon < invert_bound_2(q1).epsilon

    def test_needs_lambda(self):
        with pytest.raises(ValueError):
            invert_bound_2(BoundQuery(**LARGE))

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_closed_form_matches_bisection(self, data):
        m = data.draw(st.integers(10, 10**5))
        n = data.draw(st.integers(1, min(m, 20)))
        mu = data.draw(st.floats(n / m, 1.0))
        lam = data.draw(st.floats(mu * mu, mu))
        c = data.draw(st.integers(n, m))
        delta = data.draw(st.floats(1e-6, 0.99))
        q = BoundQuery(m, n, mu, c, delta, lam=lam)
        a, b = invert_bound_2(q), invert_bound_2_bisect(q)
        if a.applicable != b.applicable:
            # only possible when the root sits within the bisection's edge margin of 1
            L0 = math.log(2 * n / delta)
            raw = (L0 * m * mu + math.sqrt((L0 * m * mu) ** 2 + 18 * c * L0 * m * lam)) / (3 * c)
            assert abs(raw - 1) < 1e-9
        if a.applicable and b.applicable:
            assert a.epsilon == pytest.approx(b.epsilon, rel=1e-10, abs=1e-12)


class TestInvertBound3:
    def test_example(self):
        pt = invert_bound_3(BoundQuery(**LARGE))
        assert pt.epsilon == pytest.approx(B3_EPS_LARGE, rel=1e-10)

    def test_bracketing(self):
        from rowsampling.bounds import weak_coherence_sample_size as g

        q = BoundQuery(**LARGE)
        eps = invert_bound_3(q).epsilon
        assert g(eps, q) <= q.c < g(eps - 1e-9, q)

    def test_inapplicable(self):
        from rowsampling.bounds import weak_coherence_sample_size as g

        q = BoundQuery(100, 4, 1.0, 4, 0.01)
        assert g(1 - 1e-12, q) > q.c
        assert not invert_bound_3(q).applicable


class TestClosedForms:
    def test_bound4_example(self):
        pt = bound_4_epsilon(BoundQuery(**LARGE))
        assert pt.epsilon == pytest.approx(B4_EPS_LARGE, rel=1e-12)
        assert pt.kappa_bound == pytest.approx(B4_KAPPA_LARGE, rel=1e-12)

    def test_bound4_asymptotic_rate(self):
        # for c >> mu m, eps ~ sqrt(3 rho mu m / c): quadrupling c halves eps
        m, n, mu = 10**9, 4, 1e-6
        a = bound_4_epsilon(BoundQuery(m, n, mu, 10**8, 0.01)).epsilon
        b = bound_4_epsilon(BoundQuery(m, n, mu, 4 * 10**8, 0.01)).epsilon
        assert b / a == pytest.approx(0.5, rel=0.05)

    def test_bound4_inapplicable(self):
        q = BoundQuery(100, 4, 1.0, 4, 0.01)
        assert float(oracles.bound4_eps(100, 4, 1.0, 4, 0.01)) > 1
        assert not bound_4_epsilon(q).applicable

    def test_bound5_example(self):
        pt = bound_5_epsilon(BoundQuery(**LARGE))
        assert pt.epsilon == pytest.approx(B5_EPS_LARGE, rel=1e-12)
        assert pt.kappa_bound == pytest.approx(B5_KAPPA_LARGE, rel=1e-12)

    def test_bound5_inapplicable(self):
        assert B5_EPS_SMALL > 1
        assert not bound_5_epsilon(BoundQuery(**SMALL)).applicable

    def test_bound5_monotone(self):
        e = lambda c, mu: bound_5_epsilon(BoundQuery(10**6, 2, mu, c, 0.05)).epsilon
        assert e(10**6, 1e-4) < e(5 * 10**5, 1e-4)
        assert e(10**6, 2e-4) > e(10**6, 1e-4)

    def test_bound6_example(self):
        pt = bound_6_epsilon(BoundQuery(gamma=0.5, **LARGE))
        assert pt.epsilon == pytest.approx(B6_EPS_LARGE_HALF, rel=1e-12)

    def test_bound6_gamma_limit(self):
        q = BoundQuery(gamma=1 - 1e-15, **LARGE)
        rho = 2 / 3 * math.log(2 * 4 / 0.01)
        assert bound_6_epsilon(q).epsilon == pytest.approx(4e-4 * rho, rel=1e-6)

    def test_bound6_smaller_gamma_is_worse(self):
        a = bound_6_epsilon(BoundQuery(gamma=0.25, **LARGE)).epsilon
        b = bound_6_epsilon(BoundQuery(gamma=0.5, **LARGE)).epsilon
        assert a > b

    @pytest.mark.parametrize("gamma", [None, 0.0, 1.0])
    def test_bound6_rejects_gamma(self, gamma):
        q = BoundQuery(**LARGE)
        if gamma is not None:
            with pytest.raises(ValueError):
                BoundQuery(gamma=gamma, **LARGE)
        with pytest.raises(ValueError):
            bound_6_epsilon(q)


class TestCurve:
    def test_b1_nonincreasing(self):
        cs = list(range(4, 501))
        pts = evaluate_bound_curve("B1", 500, 4, cs, 0.016, 0.01)
        eps = [p.epsilon for p in pts if p.applicable]
        assert eps and all(a >= b for a, b in zip(eps, eps[1:]))
        first = next(i for i, p in enumerate(pts) if p.applicable)
        assert not any(p.applicable for p in pts[:first])
        assert all(p.applicable for p in pts[first:])

    def test_all_gaps(self):
        pts = evaluate_bound_curve("B5", 500, 4, [4, 10, 20], 0.5, 0.01)
        assert pts == [BoundPoint(False)] * 3

    def test_matches_scalar_path(self):
        cs = [200, 300, 400, 500]
        pts = evaluate_bound_curve("B1", 500, 4, cs, 0.016, 0.01)
        for c, p in zip(cs, pts):
            assert p == invert_bound_1(BoundQuery(500, 4, 0.016, c, 0.01))
            assert p.epsilon == pytest.approx(float(oracles.bound1_eps(500, 4, 0.016, c, 0.01)),
                                              rel=1e-10)

    def test_mu_sweep(self):
        mus = [0.005, 0.02, 0.05]
        pts = evaluate_bound_curve("B4", 1000, 2, 500, mus, 0.01)
        assert [p.applicable for p in pts] == [True, True, False]

    def test_b6_uses_keep_fraction(self):
        pts = evaluate_bound_curve("B6", 10_000, 4, [5_000, 10_000], 4e-4, 0.01)
        assert pts[0].epsilon == pytest.approx(B6_EPS_LARGE_HALF, rel=1e-12)
        assert not pts[1].applicable  # gamma = 1

    @pytest.mark.parametrize("c,mu", [([10, 20], [0.1, 0.2]), (10, 0.1)])
    def test_exactly_one_vector(self, c, mu):
        with pytest.raises(ValueError):
            evaluate_bound_curve("B1", 100, 2, c, mu, 0.01)


def test_bisect_helper():
    x = bisect_decreasing(lambda t: 1 - t, 0.25)
    assert x == pytest.approx(0.75, abs=1e-12)
    assert 1 - x <= 0.25

import json
from math import comb, factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpn_bruhat import invariants
from cpn_bruhat.charts import MomentumAnglePoint, PointSampler
from cpn_bruhat.errors import NonconstantRatio
from cpn_bruhat.fields import central_gradient, elementary_field, registry_field
from cpn_bruhat.poisson import make_pi_inf, make_pi_s


def pfaffian(A):
    """Expansion along the first row; fine for 2n <= 8."""
    m = A.shape[0]
    if m == 0:
        return 1.0
    total = 0.0
    for j in range(1, m):
        if A[0, j] == 0:
            continue
        keep = [k for k in range(1, m) if k != j]
        total += (-1) ** (j + 1) * A[0, j] * pfaffian(A[np.ix_(keep, keep)])
    return total


def ratio_oracle(p):
    """``pi_inf^k ^ pi_s^(n-k) / pi_s^n`` from ``(t A + B)^n = n! Pf(t A + B) top``."""
    n = p.n
    A, B = make_pi_inf(n).matrix(p), make_pi_s(n).matrix(p)
    ts = np.arange(n + 1, dtype=float)
    vals = [pfaffian(t * A + B) for t in ts]
    coeffs = np.linalg.solve(np.vander(ts, increasing=True), vals)  # coefficient of t^k
    # (tA+B)^n = sum_k C(n,k) t^k A^k B^(n-k); divide by B^n = n! Pf(B)
    return np.array([coeffs[k] / comb(n, k) / coeffs[0] for k in range(1, n + 1)])


def test_ratio_examples():
    assert invariants.f_family_ratio(MomentumAnglePoint([0.4], [0.0])) == pytest.approx([0.4])
    f = invariants.f_family_ratio(MomentumAnglePoint.from_c([0.8, 0.5]))
    assert np.allclose(f, [0.65, 0.4], atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_ratio_against_pfaffian(n, sampler):
    for p in sampler.sample_many(n, 5):
        assert np.allclose(invariants.f_family_ratio(p), ratio_oracle(p), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_ratio_at_vertex_limit(n):
    p = MomentumAnglePoint([1.0] + [0.0] * (n - 1), [0.0] * n)
    assert np.allclose(invariants.f_family_ratio(p), 1.0)


def test_pairing_n1_and_k0():
    p = MomentumAnglePoint([0.4], [1.0])
    assert invariants.f_family_pairing(p) == pytest.approx(invariants.f_family_ratio(p))
    assert invariants.f_pairing(p, 0) == 1.0


def test_elementary_sym():
    assert invariants.elementary_sym([1, 1, 1]).tolist() == [3.0, 3.0, 1.0]
    assert np.allclose(invariants.elementary_sym([0.8, 0.5]), [1.3, 0.4])
    c = np.array([0.9, 0.7, 0.3, 0.2])
    assert invariants.elementary_sym(c)[-1] == pytest.approx(np.prod(c))


def test_elementary_sym_vs_polynomial_coefficients(rng):
    c = rng.uniform(size=6)
    # prod (t + c_i) = sum e_k t^(n-k)
    assert np.allclose(invariants.elementary_sym(c), np.poly(-c)[1:])


def test_theorem_constants_small_n():
    s = PointSampler(0)
    r1 = invariants.verify_elementary_theorem(s.sample_many(1, 20))
    assert r1.constants == pytest.approx([1.0])
    r2 = invariants.verify_elementary_theorem(s.sample_many(2, 20))
    assert r2.constants == pytest.approx([2.0, 1.0])
    assert r2.binomial_hypothesis


@pytest.mark.parametrize("n", range(1, 6))
def test_theorem_constants_binomial_and_pairing(n):
    r = invariants.verify_elementary_theorem(PointSampler(n).sample_many(n, 30))
    assert max(r.spread) < 1e-9 and max(r.pairing_spread) < 1e-9
    assert r.binomial_hypothesis
    expected = [factorial(k) ** 2 * comb(n, k) for k in range(1, n + 1)]
    assert np.allclose(r.pairing_constants, expected, rtol=1e-10)


def test_theorem_spread_n4():
    r = invariants.verify_elementary_theorem(PointSampler(4).sample_many(4, 200))
    assert max(r.spread) < 1e-9


def test_theorem_raises():
    pts = PointSampler(0).sample_many(2, 3)
    with pytest.raises(NonconstantRatio):
        invariants.verify_elementary_theorem(pts, tol=-1.0)
    with pytest.raises(ValueError):
        invariants.verify_elementary_theorem(pts[:1])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**31), st.integers(0, 2**31))
def test_cross_proportionality(n, s1, s2):
    p, q = PointSampler(s1).sample(n), PointSampler(s2).sample(n)
    fp, fq = invariants.f_family_ratio(p), invariants.f_family_ratio(q)
    ep, eq = invariants.elementary_sym(p.c), invariants.elementary_sym(q.c)
    assert np.allclose(fp * eq, fq * ep, rtol=1e-9, atol=0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_f1_positive_multiple_of_weighted_momentum(n, sampler):
    w = registry_field("f1", n)
    ratios = [invariants.f_family_ratio(p)[0] / w(p) for p in sampler.sample_many(n, 10)]
    assert ratios[0] > 0
    assert np.allclose(ratios, ratios[0], rtol=1e-12)


def test_ratio_gradient_matches_closed_form(sampler):
    # the closed-form e_k gradient is proportional to the gradient of the wedge-ratio f_k
    n = 3
    p = sampler.sample(n)
    for k in range(1, n + 1):
        g_ratio = central_gradient(lambda s: invariants.f_family_ratio(s)[k - 1], p.state())
        g_closed = elementary_field(n, k).gradient(p) / comb(n, k)
        assert np.allclose(g_ratio, g_closed, atol=1e-8)


def test_involution_small_cases():
    s = PointSampler(1)
    r = invariants.involution_suite(s.sample_many(1, 5))
    assert r.max_bracket_s == 0.0 and r.max_bracket_b == 0.0
    r = invariants.involution_suite(s.sample_many(3, 100), pencils=[(1.0, 1.0)])
    assert max(r.max_bracket_s, r.max_bracket_b, r.max_bracket_pencil) < 1e-7


def test_involution_detects_non_involutive_pair(sampler):
    # sanity: the bracket machinery is not trivially zero
    from cpn_bruhat.fields import coordinate_field
    from cpn_bruhat.poisson import bracket
    p = sampler.sample(2)
    assert abs(bracket(elementary_field(2, 1), coordinate_field(2, 1), make_pi_inf(2), p)) > 0.1


def test_invariants_json_schema():
    pts = PointSampler(0).sample_many(2, 5)
    text = invariants.invariants_json(invariants.verify_elementary_theorem(pts),
                                      invariants.involution_suite(pts))
    assert set(json.loads(text)) == {"n", "constants", "max_bracket_s", "max_bracket_b", "spread"}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_recursion_traces(n, sampler):
    p = sampler.sample(n)
    tr = invariants.recursion_traces(p, 4)
    assert tr[0] == 2 * n
    assert np.allclose(tr[1:], [2 * np.sum(p.c ** k) for k in range(1, 5)], atol=1e-12)
    assert np.allclose(invariants.f_from_traces(p), invariants.elementary_sym(p.c), atol=1e-12)

import numpy as np
import pytest

from cpn_bruhat import poisson
from cpn_bruhat.charts import MomentumAnglePoint, PointSampler
from cpn_bruhat.fields import ScalarField, coordinate_field, elementary_field, registry_field
from cpn_bruhat.poisson import (BivectorField, PoissonPencil, bracket, hamiltonian_vf, make_pi_inf,
                                make_pi_s, phii, schouten, xi)


def test_pi_s_slots():
    P = make_pi_s(1).matrix(np.zeros(2))
    assert P.tolist() == [[0.0, 1.0], [-1.0, 0.0]]
    P = make_pi_s(3).matrix(np.zeros(6))
    assert np.count_nonzero(P) == 6
    assert all(P[xi(i), phii(i)] == 1.0 for i in range(3))


def test_canonical_relations(sampler):
    n = 3
    p = sampler.sample(n)
    for i in range(n):
        for j in range(n):
            b = bracket(coordinate_field(n, xi(i)), coordinate_field(n, phii(j)), make_pi_s(n), p)
            assert b == (1.0 if i == j else 0.0)


def test_pi_inf_example_n2():
    P = make_pi_inf(2).matrix(MomentumAnglePoint([0.8, -0.3], [0.1, 0.2]))
    assert P[xi(0), phii(0)] == pytest.approx(0.8)
    assert P[xi(1), phii(0)] == pytest.approx(-0.3)
    assert P[xi(1), phii(1)] == pytest.approx(0.5)
    assert P[xi(0), phii(1)] == 0.0
    assert P[xi(0), xi(1)] == 0.0 and P[phii(0), phii(1)] == 0.0


def test_pi_inf_n1():
    assert make_pi_inf(1).matrix(MomentumAnglePoint([0.4], [0.0]))[0, 1] == pytest.approx(0.4)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_pi_inf_rank_on_closure(n):
    # full rank at the cell center, rank drops by two on the face c_n = 0, zero at c = 0
    center = make_pi_inf(n).matrix(MomentumAnglePoint([1.0] + [0.0] * (n - 1), [0.0] * n))
    assert np.linalg.matrix_rank(center) == 2 * n
    c = np.linspace(0.9, 0.2, n)
    c[-1] = 0.0
    face = make_pi_inf(n).matrix(MomentumAnglePoint.from_c(c))
    assert np.linalg.matrix_rank(face) == 2 * n - 2
    assert not np.any(make_pi_inf(n).matrix(MomentumAnglePoint.from_c(np.zeros(n))))


def test_pi_inf_theta_expansion(sampler):
    # Theta_i = c_i d/dx_i + sum_{j>i} x_j d/dx_j, pi_inf = sum_i Theta_i ^ d/dphi_i
    n = 4
    p = sampler.sample(n)
    x = p.x
    c = np.cumsum(x)
    P = np.zeros((2 * n, 2 * n))
    for i in range(n):
        theta = np.zeros(2 * n)
        theta[xi(i)] = c[i]
        for j in range(i + 1, n):
            theta[xi(j)] = x[j]
        dphi = np.zeros(2 * n)
        dphi[phii(i)] = 1.0
        P += np.outer(theta, dphi) - np.outer(dphi, theta)
    assert np.allclose(make_pi_inf(n).matrix(p), P, atol=1e-15)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_antisymmetry(n, sampler):
    for p in sampler.sample_many(n, 10):
        assert make_pi_inf(n).is_antisymmetric(p)
        assert make_pi_s(n).is_antisymmetric(p)
        assert PoissonPencil.standard(n, 1.3, -0.7).field().is_antisymmetric(p)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_analytic_jacobian_matches_fd(n, sampler):
    P = make_pi_inf(n)
    for p in sampler.sample_many(n, 10):
        assert np.allclose(P.jacobian(p), P.jacobian(p, analytic=False), atol=1e-6)


def test_pencil_values(sampler):
    n = 3
    p = sampler.sample(n)
    Pi, Ps = make_pi_inf(n).matrix(p), make_pi_s(n).matrix(p)
    assert np.allclose(poisson.pencil_field(PoissonPencil.standard(n, 1, 0), p), Pi)
    assert np.allclose(poisson.pencil_field(PoissonPencil.standard(n, 0, 1), p), Ps)
    assert np.allclose(poisson.pencil_field(PoissonPencil.standard(n, 1, 1), p), Pi + Ps)


def test_bracket_examples():
    p = MomentumAnglePoint([0.8, -0.3], [0.0, 0.0])
    x1, phi1 = coordinate_field(2, xi(0)), coordinate_field(2, phii(0))
    assert bracket(x1, phi1, make_pi_s(2), p) == 1.0
    assert bracket(x1, phi1, make_pi_inf(2), p) == pytest.approx(0.8)
    f = elementary_field(2, 2)
    assert bracket(f, f, make_pi_inf(2), p) == 0.0


def test_hamiltonian_vf_anchor():
    n = 3
    p = PointSampler(1).sample(n)
    X = hamiltonian_vf(coordinate_field(n, xi(0)), make_pi_s(n), p)
    expected = np.zeros(2 * n)
    expected[phii(0)] = 1.0
    assert np.array_equal(X, expected)


def test_hamiltonian_vf_f1_constant(sampler):
    n = 4
    for p in sampler.sample_many(n, 3):
        X = hamiltonian_vf(registry_field("f1", n), make_pi_s(n), p)
        assert np.array_equal(X[0::2], np.zeros(n))
        assert np.array_equal(X[1::2], [4.0, 3.0, 2.0, 1.0])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hamiltonian_vf_sum_c_under_pi_inf(n, sampler):
    # phi_j component (n-j+1) c_j + (n-j) x_{j+1} + (n-j-1) x_{j+2} + ... + x_n
    for p in sampler.sample_many(n, 5):
        x, c = p.x, p.c
        V = [(n - j) * c[j] + sum((n - a) * x[a] for a in range(j + 1, n)) for j in range(n)]
        X = hamiltonian_vf(registry_field("e-sum", n), make_pi_inf(n), p)
        assert np.allclose(X[1::2], V, atol=1e-14)
        assert np.allclose(X[0::2], 0.0)


def linear_bivector(rng, d):
    """``P(s) = A_0 + sum_l s_l A_l`` with random antisymmetric A's; generically not Poisson."""
    A = rng.normal(size=(d + 1, d, d))
    A = A - A.transpose(0, 2, 1)
    return BivectorField(d // 2, lambda s: A[0] + np.einsum("l,lij->ij", s, A[1:]),
                         lambda s: A[1:].copy(), name="random")


def test_schouten_against_jacobiator(rng):
    # for coordinate functions, [P, P]^{ijk} = -2 {x_i, {x_j, x_k}} + cyclic
    d = 4
    P = linear_bivector(rng, d)
    s = rng.normal(size=d)
    T = poisson.schouten_tensor(P, P, s)
    assert np.max(np.abs(T)) > 1e-2
    fields = [coordinate_field(d // 2, i) for i in range(d)]
    for i, j, k in [(0, 1, 2), (0, 2, 3), (1, 2, 3), (0, 1, 3)]:
        jac = poisson.jacobiator(P, fields[i], fields[j], fields[k], s)
        assert T[i, j, k] == pytest.approx(-2 * jac, abs=1e-7)


def test_schouten_total_antisymmetry(rng):
    P, Q = linear_bivector(rng, 6), linear_bivector(rng, 6)
    T = poisson.schouten_tensor(P, Q, rng.normal(size=6))
    assert np.allclose(T, -T.transpose(1, 0, 2))
    assert np.allclose(T, -T.transpose(0, 2, 1))


def test_schouten_symmetric_in_arguments(rng):
    P, Q = linear_bivector(rng, 4), linear_bivector(rng, 4)
    s = rng.normal(size=4)
    assert np.allclose(poisson.schouten_tensor(P, Q, s), poisson.schouten_tensor(Q, P, s))


def test_schouten_pi_s_exact():
    for n in range(1, 5):
        assert schouten(make_pi_s(n), make_pi_s(n), np.zeros(2 * n)).max_abs() == 0.0


def test_schouten_n1_is_empty_trivector():
    val = schouten(make_pi_inf(1), make_pi_s(1), MomentumAnglePoint([0.3], [0.0]))
    assert val.dim == 2 and val.multivector() is None


@pytest.mark.parametrize("n", range(1, 6))
def test_compatibility_and_jacobi(n, sampler):
    Pi, Ps = make_pi_inf(n), make_pi_s(n)
    for p in sampler.sample_many(n, 20):
        assert schouten(Pi, Ps, p).max_abs() < 1e-8
        assert schouten(Pi, Pi, p).max_abs() < 1e-8
        assert schouten(Pi, Ps, p, analytic=False).max_abs() < 1e-6


def test_schouten_multivector_matches_tensor(sampler):
    p = sampler.sample(2)
    val = schouten(make_pi_inf(2), make_pi_inf(2), p)
    assert val.multivector().grade == 3


def test_jacobiator_coordinates():
    n = 2
    f = [coordinate_field(n, i) for i in (xi(0), phii(0), xi(1))]
    assert poisson.jacobiator(make_pi_s(n), *f, np.array([0.6, 0.1, -0.2, 0.4])) == 0.0


@pytest.mark.parametrize("structure", ["pi_inf", "pencil"])
def test_jacobiator_bruhat_and_pencil(structure, sampler):
    n = 3
    P = make_pi_inf(n) if structure == "pi_inf" else PoissonPencil.standard(n, 2.0, -1.0).field()
    rng = sampler.rng
    for p in sampler.sample_many(n, 10):
        idx = rng.choice(2 * n, size=3, replace=False)
        f = [coordinate_field(n, int(i)) for i in idx]
        assert abs(poisson.jacobiator(P, *f, p)) < 1e-7


def test_pencil_closure_random_pairs(sampler):
    n = 3
    rng = sampler.rng
    for _ in range(5):
        a, b = rng.uniform(-2, 2, size=2)
        P = PoissonPencil.standard(n, a, b).field()
        p = sampler.sample(n)
        assert schouten(P, P, p).max_abs() < 1e-8
        f = [coordinate_field(n, i) for i in (0, 3, 4)]
        assert abs(poisson.jacobiator(P, *f, p)) < 1e-7


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_q_route_reproduces_theta(n, sampler):
    for p in sampler.sample_many(n, 20):
        assert np.allclose(poisson.bruhat_via_q_route(p), make_pi_inf(n).matrix(p), atol=1e-12)


def test_q_route_sign_of_action_angle_form(sampler):
    # the Lu form lands on minus the standard action-angle bivector in (q, phi)
    n = 3
    p = sampler.sample(n)
    assert np.allclose(poisson.bruhat_in_qphi(p), poisson.action_angle_matrix(n, -1.0), atol=1e-12)
    assert np.allclose(poisson.push_action_angle(p, -1.0), make_pi_inf(n).matrix(p), atol=1e-12)
    assert np.allclose(poisson.push_action_angle(p, 1.0), -make_pi_inf(n).matrix(p), atol=1e-12)


def test_recursion_operator_n1():
    N = poisson.recursion_operator(MomentumAnglePoint([0.4], [0.0]))
    assert np.allclose(np.linalg.eigvals(N), [0.4, 0.4])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_recursion_operator_spectrum(n, sampler):
    p = sampler.sample(n)
    ev = np.sort(np.linalg.eigvals(poisson.recursion_operator(p)).real)
    assert np.allclose(ev, np.sort(np.repeat(p.c, 2)), atol=1e-8)


def test_recursion_operator_identity_for_pi_s():
    n = 3
    s = np.zeros(2 * n)
    Ps = make_pi_s(n).coeff(s)
    assert np.array_equal(Ps @ (-Ps), np.eye(2 * n))


def test_bivector_add_and_combine(sampler):
    n = 2
    p = sampler.sample(n)
    Pi, Ps = make_pi_inf(n), make_pi_s(n)
    assert np.allclose((Pi + Ps).matrix(p), Pi.matrix(p) + Ps.matrix(p))
    C = poisson.combine(2.0, Pi, -3.0, Ps)
    assert np.allclose(C.matrix(p), 2 * Pi.matrix(p) - 3 * Ps.matrix(p))
    assert np.allclose(C.jacobian(p), 2 * Pi.jacobian(p))


def test_non_torus_field_fd_gradient():
    n = 1
    f = ScalarField(n, lambda s: s[0] ** 2 * np.sin(s[1]))
    s = np.array([0.3, 0.7])
    g = f.gradient(s)
    assert np.allclose(g, [2 * 0.3 * np.sin(0.7), 0.09 * np.cos(0.7)], atol=1e-9)

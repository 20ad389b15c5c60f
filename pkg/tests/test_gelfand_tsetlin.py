import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpn_bruhat import gelfand_tsetlin as gt
from cpn_bruhat.charts import HomogeneousPoint
from cpn_bruhat.errors import NoConventionMatches


def random_hermitian(rng, m):
    G = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    return (G + G.conj().T) / 2


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_jacobi_matches_eigvalsh(m, seed):
    H = random_hermitian(np.random.default_rng(seed), m)
    ev = gt.jacobi_eigenvalues(H)
    assert np.allclose(ev, np.linalg.eigvalsh(H)[::-1], atol=1e-11)


def test_jacobi_degenerate_and_empty():
    assert gt.jacobi_eigenvalues(np.zeros((0, 0))).size == 0
    assert np.allclose(gt.jacobi_eigenvalues(np.eye(4) * 2.5), [2.5] * 4)
    assert np.allclose(gt.jacobi_eigenvalues(np.diag([3.0, -1.0, 2.0])), [3.0, 2.0, -1.0])


def test_random_unitary_properties():
    for size in range(2, 7):
        A = gt.random_unitary(size, seed=size).A
        assert np.linalg.norm(A.conj().T @ A - np.eye(size)) < 1e-12
        assert abs(abs(np.linalg.det(A)) - 1) < 1e-10
        assert np.linalg.norm(A[:, 0]) == pytest.approx(1.0)
    assert np.array_equal(gt.random_unitary(4, seed=3).A, gt.random_unitary(4, seed=3).A)
    with pytest.raises(ValueError):
        gt.UnitaryFrame(np.ones((2, 2)))


def test_orbit_point_identity():
    M = gt.orbit_point(gt.UnitaryFrame.identity(3), lam=2.0).M
    expected = np.zeros((3, 3), dtype=complex)
    expected[0, 0] = 2j
    assert np.array_equal(M, expected)


@pytest.mark.parametrize("size", [2, 4, 6])
def test_orbit_point_forms_agree(size):
    frame = gt.random_unitary(size, seed=size)
    M = gt.orbit_point(frame, 1.5)
    M.check()
    assert np.trace(M.hermitian()).real == pytest.approx(1.5)
    assert np.allclose(M.M, gt.orbit_point_conjugation(frame, 1.5).M, atol=1e-12)


def test_project_to_cpn():
    assert gt.project_to_cpn(gt.UnitaryFrame.identity(3)).same_point(HomogeneousPoint([1, 0, 0]))
    frame = gt.random_unitary(4, seed=1)
    Z = gt.project_to_cpn(frame).Z
    assert np.sum(np.abs(Z) ** 2) == pytest.approx(1.0)
    A2 = frame.A.copy()
    A2[:, 0] *= np.exp(0.7j)
    assert gt.project_to_cpn(gt.UnitaryFrame(A2)).same_point(gt.project_to_cpn(frame))


def test_identity_pattern_n2():
    pat = gt.gt_pattern(gt.orbit_point(gt.UnitaryFrame.identity(3)), "UL")
    assert [r.tolist() for r in pat.rows] == [[1.0, 0.0], [1.0]]
    assert json.loads(pat.to_json())["rows"] == [[1.0, 0.0], [1.0]]


@pytest.mark.parametrize("chain", gt.CHAINS)
@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_rank_one_law(chain, n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        frame = gt.random_unitary(n + 1, rng=rng)
        pat = gt.gt_pattern(gt.orbit_point(frame, 1.3), chain)
        oracle = gt.rank_one_rows(frame, 1.3, chain)
        for row, ref in zip(pat.rows, oracle):
            assert np.allclose(row, ref, atol=1e-12)
            assert np.all(np.abs(row[1:]) < 1e-12)
        assert pat.interlaces()


@pytest.mark.parametrize("chain", gt.CHAINS)
def test_interlacing_generic_hermitian(chain, rng):
    for m in range(2, 7):
        H = random_hermitian(rng, m)
        pat = gt.gt_pattern(gt.OrbitMatrix(1j * H, 1.0), chain)
        assert pat.interlaces()
        assert [r.size for r in pat.rows] == list(range(m - 1, 0, -1))


def test_interlacing_detects_violation():
    pat = gt.GTPattern(np.array([1.0, 0.0]), [np.array([2.0])])
    assert not pat.interlaces()


def test_unitary_invariance():
    # only the first column (up to phase) matters
    frame = gt.random_unitary(4, seed=8)
    A = frame.A.copy()
    A[:, 1:] = A[:, 1:] @ gt.random_unitary(3, seed=9).A
    A[:, 0] *= np.exp(-1.1j)
    p1 = gt.gt_pattern(gt.orbit_point(frame), "UL")
    p2 = gt.gt_pattern(gt.orbit_point(gt.UnitaryFrame(A)), "UL")
    for a, b in zip(p1.rows, p2.rows):
        assert np.allclose(a, b, atol=1e-12)


def test_chains_are_nested():
    for chain in gt.CHAINS:
        for n in range(1, 6):
            sets = [set(gt.chain_indices(chain, n, k)) for k in range(1, n + 1)]
            assert all(len(s) == n + 1 - k for k, s in enumerate(sets, start=1))
            assert all(b < a for a, b in zip(sets, sets[1:]))


@pytest.mark.parametrize("n", range(1, 6))
def test_anchored_reversed_is_unique_match(n):
    frames = [gt.random_unitary(n + 1, rng=np.random.default_rng(100 + n + i)) for i in range(50)]
    rep = gt.verify_mu_formula(frames, conventions=gt.ALL_CONVENTIONS)
    assert "ANCHORED/reversed" in rep.matched
    matched_classes = [cls for cls in rep.classes if set(cls) & set(rep.matched)]
    assert len(matched_classes) == 1
    assert rep.max_subleading < 1e-8 and rep.interlacing


def test_n1_orders_merge_and_upper_left_matches():
    # with one row both orders pick c_1, so conventions merge per chain
    frames = [gt.random_unitary(2, seed=i) for i in range(10)]
    rep = gt.verify_mu_formula(frames, conventions=gt.LITERAL_CONVENTIONS)
    assert len(rep.classes) == 2
    assert rep.matched == ["UL/identity", "UL/reversed"]


@pytest.mark.parametrize("n", [2, 3])
def test_literal_conventions_have_no_match(n):
    frames = [gt.random_unitary(n + 1, seed=i) for i in range(20)]
    rep = gt.verify_mu_formula(frames, conventions=gt.LITERAL_CONVENTIONS, raise_on_fail=False)
    assert rep.matched == []
    assert min(rep.residuals.values()) > 1e-2
    with pytest.raises(NoConventionMatches):
        gt.verify_mu_formula(frames, conventions=gt.LITERAL_CONVENTIONS)


def test_literal_formula_impossible_at_first_row():
    # with the upper-left chain the 1x1 bottom row is lam |v_0|^2 while c_1 = 1 - |v_1|^2
    frame = gt.random_unitary(3, seed=4)
    v = frame.A[:, 0]
    pat = gt.gt_pattern(gt.orbit_point(frame), "UL")
    assert pat.rows[-1][0] == pytest.approx(abs(v[0]) ** 2)
    assert gt.momentum_c(frame)[0] == pytest.approx(1 - abs(v[1]) ** 2)


def test_identity_frame_is_degenerate():
    rep = gt.verify_mu_formula([gt.UnitaryFrame.identity(3)], raise_on_fail=False)
    assert rep.samples_used == 0 and rep.samples_skipped == 1
    with pytest.raises(NoConventionMatches):
        gt.verify_mu_formula([gt.UnitaryFrame.identity(3)])


def test_triangle_rendering():
    pat = gt.gt_pattern(gt.orbit_point(gt.UnitaryFrame.identity(3)), "UL")
    lines = pat.triangle().splitlines()
    assert len(lines) == 2 and lines[0].split() == ["1", "0"] and lines[1].split() == ["1"]

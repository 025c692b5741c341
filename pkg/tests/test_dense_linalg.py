import numpy as np
import pytest
from hypothesis import given, strategies as st

from orbitkit import dense_linalg as dl
from orbitkit import sampling
from orbitkit.errors import NoConvergence, NotAProjection, NotHermitian, NotNormal, SingularInput

from conftest import op_norm


def test_hermitian_2x2():
    eig = dl.hermitian_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(eig.values, [3.0, 1.0], atol=1e-14)


def test_hermitian_scalar():
    eig = dl.hermitian_eigen(np.array([[5.0]]))
    assert eig.values.tolist() == [5.0]
    np.testing.assert_array_equal(eig.vectors, [[1.0]])


def test_hermitian_random_residual(gen):
    h = sampling.hermitian(gen, 8)
    eig = dl.hermitian_eigen(h)
    assert eig.residual <= 1e-10 * np.linalg.norm(h)
    np.testing.assert_allclose(eig.values, np.sort(np.linalg.eigvalsh(h))[::-1], atol=1e-12)
    assert np.all(np.diff(eig.values) <= 0)


def test_hermitian_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        dl.hermitian_eigen(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_no_convergence_is_reported(monkeypatch):
    monkeypatch.setattr(dl, "MAX_SWEEPS", 0)
    with pytest.raises(NoConvergence):
        dl.hermitian_eigen(np.array([[1.0, 1.0], [1.0, 2.0]]))


def test_normal_eigen_diag_i():
    vals = dl.normal_eigen(np.diag([1j, -1j])).values
    assert sorted(vals, key=lambda z: z.imag) == pytest.approx([-1j, 1j], abs=1e-14)


def test_normal_eigen_matches_hermitian(gen):
    h = sampling.hermitian(gen, 6)
    a = np.sort(dl.normal_eigen(h).values.real)
    b = np.sort(dl.hermitian_eigen(h).values)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_normal_eigen_rotated():
    c, s = np.cos(0.3), np.sin(0.3)
    u = np.array([[c, -s], [s, c]])
    x = u @ np.diag([1 + 2j, 3]) @ u.T
    vals = sorted(dl.normal_eigen(x).values, key=abs)
    assert vals[0] == pytest.approx(1 + 2j, abs=1e-9)
    assert vals[1] == pytest.approx(3, abs=1e-9)


def test_normal_eigen_rejects_shift():
    with pytest.raises(NotNormal):
        dl.normal_eigen(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_svd_nilpotent():
    s, _, _ = dl.svd(np.array([[0.0, 2.0], [0.0, 0.0]]))
    np.testing.assert_allclose(s, [2.0, 0.0], atol=1e-15)


def test_svd_unitary(gen):
    s, _, _ = dl.svd(sampling.unitary(gen, 5))
    np.testing.assert_allclose(s, np.ones(5), atol=1e-12)


def test_svd_reconstruction(gen):
    x = sampling.complex_matrix(gen, 6)
    s, left, right = dl.svd(x)
    assert np.linalg.norm(left @ np.diag(s) @ right.conj().T - x) <= 1e-9 * op_norm(x)
    np.testing.assert_allclose(left.conj().T @ left, np.eye(6), atol=1e-10)
    np.testing.assert_allclose(right.conj().T @ right, np.eye(6), atol=1e-10)
    np.testing.assert_allclose(s, np.linalg.svd(x, compute_uv=False), atol=1e-12)


def test_svd_rank_deficient_completion(gen):
    v = sampling.complex_matrix(gen, 5, 2)
    x = v @ v.conj().T
    s, left, right = dl.svd(x)
    np.testing.assert_allclose(left.conj().T @ left, np.eye(5), atol=1e-10)
    assert np.linalg.norm(left @ np.diag(s) @ right.conj().T - x) <= 1e-9 * op_norm(x)


def test_polar_unitary_examples():
    np.testing.assert_allclose(dl.polar_unitary(2 * np.eye(3)), np.eye(3), atol=1e-14)
    np.testing.assert_allclose(dl.polar_unitary(np.diag([3.0, -2.0])), np.diag([1.0, -1.0]), atol=1e-14)


def test_polar_unitary_near_identity(gen):
    z = sampling.complex_matrix(gen, 6)
    t = np.eye(6) + 0.4 * z / op_norm(z)
    w = dl.polar_unitary(t)
    np.testing.assert_allclose(w.conj().T @ w, np.eye(6), atol=1e-9)
    f = dl.polar(t)
    np.testing.assert_allclose(f.isometric_factor @ f.positive_factor, t, atol=1e-10)


def test_polar_unitary_singular():
    with pytest.raises(SingularInput):
        dl.polar_unitary(np.diag([1.0, 0.0]))


def test_polar_unitary_commutes_with_normal(gen):
    u = sampling.unitary(gen, 5)
    t = u @ np.diag([1 + 1j, 2, -3j, 0.5, 4]) @ u.conj().T
    w = dl.polar_unitary(t)
    assert op_norm(w @ t - t @ w) <= 1e-9


def test_numeric_rank_examples(gen):
    assert dl.numeric_rank(np.diag([1.0, 1e-14]), 1e-9) == 1
    assert dl.numeric_rank(np.zeros((3, 3)), 1e-9) == 0
    x = sum(np.outer(sampling.complex_matrix(gen, 6, 1), sampling.complex_matrix(gen, 1, 6)) for _ in range(2))
    assert dl.numeric_rank(x, 1e-9) == 2


def test_isometry_check_examples():
    assert dl.isometry_check(np.eye(3), np.eye(3)).is_isometry
    assert dl.isometry_check(np.array([[0.0, 0.0], [1.0, 0.0]]), np.diag([1.0, 0.0])).is_isometry
    rep = dl.isometry_check(0.5 * np.eye(2), np.eye(2))
    assert not rep.is_isometry
    assert rep.defect == pytest.approx(0.75)
    with pytest.raises(NotAProjection):
        dl.isometry_check(np.eye(2), 2 * np.eye(2))


@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_svd_unitarily_invariant(n, seed):
    gen = np.random.default_rng(seed)
    x = sampling.complex_matrix(gen, n)
    u = dl.polar_unitary(np.eye(n) + 0.3 * sampling.complex_matrix(gen, n) / (2 * n))
    v = dl.polar_unitary(np.eye(n) + 0.3 * sampling.complex_matrix(gen, n) / (2 * n))
    np.testing.assert_allclose(dl.singular_values_of(u @ x @ v), dl.singular_values_of(x), atol=1e-9 * max(1, op_norm(x)))


@given(st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_hermitian_eigen_property(n, seed):
    h = sampling.hermitian(np.random.default_rng(seed), n)
    eig = dl.hermitian_eigen(h)
    assert eig.residual <= 1e-10 * max(np.linalg.norm(h), 1e-300)
    np.testing.assert_allclose(eig.vectors.conj().T @ eig.vectors, np.eye(n), atol=1e-10)

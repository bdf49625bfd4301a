import numpy as np
import pytest

from eofcap.errors import DimensionError, NotHermitianError, NotPSDError
from eofcap.matcore import (
    adjoint,
    hermitian_eig,
    kron,
    matrix_log2,
    matrix_sqrt,
    multiply,
    partial_trace_a,
    partial_trace_b,
    takagi,
)
from eofcap.states import SIGMA_X, SIGMA_Y, SIGMA_Z, bell_state, projector, random_density

I2 = np.eye(2, dtype=complex)


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


def test_multiply_and_adjoint_basics(rng):
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    np.testing.assert_allclose(multiply(I2, x), x)
    np.testing.assert_allclose(multiply(SIGMA_Z, SIGMA_Z), I2)
    yy = kron(SIGMA_Y, SIGMA_Y)
    np.testing.assert_allclose(multiply(yy, yy), np.eye(4), atol=1e-15)
    np.testing.assert_allclose(adjoint(adjoint(x)), x)
    np.testing.assert_allclose(adjoint([[0, 1], [0, 0]]), [[0, 0], [1, 0]])
    with pytest.raises(DimensionError):
        multiply(np.eye(2), np.eye(3))


def test_kron_index_convention():
    np.testing.assert_allclose(kron(np.diag([2.0, 3.0]), I2), np.diag([2, 2, 3, 3]))
    np.testing.assert_allclose(kron(SIGMA_Z, I2) @ bell_state(0), bell_state(3))


def test_eig_small_cases():
    spec = hermitian_eig(I2)
    np.testing.assert_allclose(spec.eigenvalues, [1, 1])
    spec = hermitian_eig(SIGMA_Z)
    np.testing.assert_allclose(spec.eigenvalues, [1, -1])
    np.testing.assert_allclose(spec.eigenvectors, np.eye(2))
    spec = hermitian_eig(0.5 * (I2 + 3 / 16 * SIGMA_Z))
    np.testing.assert_allclose(spec.eigenvalues, [19 / 32, 13 / 32], atol=1e-15)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eig([[0, 1], [0, 0]])
    with pytest.raises(DimensionError):
        hermitian_eig(np.ones((2, 3)))


def test_eig_matches_lapack(rng):
    for _ in range(200):
        n = rng.integers(1, 5)
        a = random_hermitian(rng, n)
        spec = hermitian_eig(a)
        np.testing.assert_allclose(spec.eigenvalues, np.linalg.eigvalsh(a)[::-1], atol=1e-12)
        np.testing.assert_allclose(spec.reconstruct(), a, atol=1e-12)
        v = spec.eigenvectors
        np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-12)


def test_eig_phase_and_degenerate_order():
    # degenerate pair: columns come back ordered by component magnitudes
    spec = hermitian_eig(np.diag([1.0, 1.0, 0.0]))
    np.testing.assert_allclose(spec.eigenvectors, np.eye(3), atol=1e-15)
    spec = hermitian_eig(SIGMA_Y)
    for i in range(2):
        v = spec.eigenvectors[:, i]
        k = np.argmax(np.abs(v) > np.abs(v).max() - 1e-12)
        assert abs(v[k].imag) < 1e-15 and v[k].real > 0


def test_eig_is_deterministic(rng):
    a = random_hermitian(rng, 4)
    first = hermitian_eig(a)
    second = hermitian_eig(a.copy())
    np.testing.assert_array_equal(first.eigenvectors, second.eigenvectors)


def test_matrix_sqrt(rng):
    np.testing.assert_allclose(matrix_sqrt(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(matrix_sqrt(np.diag([4.0, 9.0])), np.diag([2, 3]), atol=1e-14)
    for _ in range(50):
        p = random_density(rng, 4, rng.integers(1, 5))
        s = matrix_sqrt(p)
        np.testing.assert_allclose(s @ s, p, atol=1e-12)
    with pytest.raises(NotPSDError):
        matrix_sqrt(np.diag([1.0, -0.1]))


def test_matrix_log2():
    np.testing.assert_allclose(matrix_log2(np.eye(2)), np.zeros((2, 2)), atol=1e-15)
    np.testing.assert_allclose(matrix_log2(np.diag([0.5, 0.5])), -np.eye(2), atol=1e-15)
    got = matrix_log2(np.diag([19 / 32, 13 / 32]))
    np.testing.assert_allclose(np.diag(got).real, [-0.75207, -1.29956], atol=1e-5)
    # kernel directions contribute nothing
    np.testing.assert_allclose(matrix_log2(np.diag([1.0, 0.0])), np.zeros((2, 2)), atol=1e-15)


def test_partial_traces(rng):
    np.testing.assert_allclose(partial_trace_b(projector(bell_state(0)), 2, 2), I2 / 2, atol=1e-15)
    rho = random_density(rng, 2)
    sigma = random_density(rng, 3)
    np.testing.assert_allclose(partial_trace_b(np.kron(rho, 2 * sigma), 2, 3), 2 * rho, atol=1e-14)
    np.testing.assert_allclose(partial_trace_a(np.kron(rho, sigma), 2, 3), sigma, atol=1e-14)
    with pytest.raises(DimensionError):
        partial_trace_b(np.eye(4), 2, 3)


def test_takagi_factorization(rng):
    for _ in range(200):
        n = rng.integers(1, 5)
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        if rng.random() < 0.3:
            # rank-deficient case exercises the kernel branch
            b = rng.normal(size=(n, 1)) + 1j * rng.normal(size=(n, 1))
            a = b @ b.T
        k = a + a.T
        s, w = takagi(k)
        np.testing.assert_allclose(w @ np.diag(s) @ w.T, k, atol=1e-11)
        np.testing.assert_allclose(w.conj().T @ w, np.eye(n), atol=1e-11)
        np.testing.assert_allclose(np.sort(s), np.sort(np.linalg.svd(k, compute_uv=False)), atol=1e-11)


def test_takagi_rejects_non_symmetric():
    with pytest.raises(ValueError):
        takagi(SIGMA_X + 1j * np.array([[0, 1], [0, 0]]))

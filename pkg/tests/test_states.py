import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eofcap.errors import InvalidStateError
from eofcap.states import (
    SIGMA_Z,
    Ensemble,
    bell_state,
    binary_entropy,
    bloch_from_qubit,
    check_density,
    holevo_quantity,
    ket,
    mixing_identity_residual,
    projector,
    qubit_from_bloch,
    random_density,
    random_pure,
    relative_entropy,
    von_neumann_entropy,
)

I2 = np.eye(2, dtype=complex)
GAMMA_A = 0.5 * (I2 + 3 / 16 * SIGMA_Z)


def test_bell_states():
    s = 1 / np.sqrt(2)
    np.testing.assert_allclose(bell_state(0), [s, 0, 0, s])
    np.testing.assert_allclose(bell_state(3), [s, 0, 0, -s])
    assert abs(np.vdot(bell_state(0), bell_state(3))) < 1e-15
    with pytest.raises(ValueError):
        bell_state(1)


def test_check_density_rejects():
    with pytest.raises(InvalidStateError):
        check_density(np.eye(2))
    with pytest.raises(InvalidStateError):
        check_density(np.diag([1.2, -0.2]))


def test_entropy_values():
    assert von_neumann_entropy(projector(ket("0"))) == pytest.approx(0, abs=1e-15)
    assert von_neumann_entropy(I2 / 2) == pytest.approx(1)
    assert von_neumann_entropy(GAMMA_A) == pytest.approx(0.9745, abs=5e-5)
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(3 / 16) == pytest.approx(0.9745, abs=5e-5)
    assert binary_entropy(np.sqrt(231) / 16) == pytest.approx(0.1689, abs=5e-5)
    with pytest.raises(ValueError):
        binary_entropy(1.5)


def test_relative_entropy_cases(rng):
    w = random_density(rng, 2)
    assert relative_entropy(w, w) == pytest.approx(0, abs=1e-12)
    assert relative_entropy(projector(ket("0")), I2 / 2) == pytest.approx(1)
    assert relative_entropy(projector(ket("1")), projector(ket("0"))) == np.inf


def test_relative_entropy_nonnegative(rng):
    for _ in range(200):
        d = rng.choice([2, 4])
        a = random_density(rng, d)
        b = random_density(rng, d)
        assert relative_entropy(a, b) > 0
        assert relative_entropy(a, a) == pytest.approx(0, abs=1e-10)


def test_holevo_quantity():
    orth = Ensemble(np.array([0.5, 0.5]), (ket("0"), ket("1")))
    assert holevo_quantity(orth) == pytest.approx(1)
    rho = GAMMA_A
    assert holevo_quantity(Ensemble(np.array([0.5, 0.5]), (rho, rho))) == pytest.approx(0, abs=1e-14)


def test_mixing_identity(rng):
    assert mixing_identity_residual(Ensemble(np.array([0.5, 0.5]), (ket("0"), ket("1")))) < 1e-12
    assert mixing_identity_residual(Ensemble(np.array([1.0]), (ket("0"),))) < 1e-12
    for _ in range(200):
        k = rng.integers(1, 5)
        w = rng.dirichlet(np.ones(k))
        members = tuple(random_density(rng, 2, rng.integers(1, 3)) for _ in range(k))
        assert mixing_identity_residual(Ensemble(w, members)) <= 1e-9


def test_bloch_roundtrip():
    np.testing.assert_allclose(bloch_from_qubit(I2 / 2), [0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(bloch_from_qubit(GAMMA_A), [0, 0, 3 / 16], atol=1e-15)
    np.testing.assert_allclose(bloch_from_qubit(projector(ket("0"))), [0, 0, 1], atol=1e-15)
    with pytest.raises(InvalidStateError):
        qubit_from_bloch([1.0, 0.5, 0.0])


@settings(max_examples=200, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_bloch_inverse(x, y, z):
    v = np.array([x, y, z])
    n = np.linalg.norm(v)
    if n > 1:
        v = v / n
    np.testing.assert_allclose(bloch_from_qubit(qubit_from_bloch(v)), v, atol=1e-14)


def test_random_pure_is_normalized(rng):
    psi = random_pure(rng, 4)
    assert np.linalg.norm(psi) == pytest.approx(1)

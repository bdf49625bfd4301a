import numpy as np
import pytest

from conftest import msw, solved
from eofcap import channels as chn
from eofcap.errors import InvalidChannelError
from eofcap.matcore import partial_trace_b
from eofcap.states import Ensemble, ket, projector, random_density, random_pure
from eofcap.wootters import concurrence
from oracles import amplitude_damping_capacity, depolarizing_capacity

I2 = np.eye(2, dtype=complex)


def test_channel_validation():
    with pytest.raises(InvalidChannelError):
        chn.KrausChannel((2 * I2,))
    with pytest.raises(InvalidChannelError):
        chn.KrausChannel(tuple(I2 / np.sqrt(5) for _ in range(5)))
    with pytest.raises(InvalidChannelError):
        chn.KrausChannel((np.eye(3),))


def test_apply_examples(rng):
    rho = random_density(rng, 2)
    np.testing.assert_allclose(chn.apply(chn.identity_channel(), rho), rho, atol=1e-15)
    np.testing.assert_allclose(chn.apply(chn.depolarizing(1.0), rho), I2 / 2, atol=1e-15)
    out = chn.apply(chn.amplitude_damping(0.36), projector(ket("1")))
    np.testing.assert_allclose(out, np.diag([0.36, 0.64]), atol=1e-15)


def test_lift_examples(rng):
    rho = random_density(rng, 2)
    lifted = chn.lift(chn.identity_channel(), rho)
    np.testing.assert_allclose(lifted.gamma_ab, np.kron(rho, projector(ket("0"))), atol=1e-15)
    ad = chn.amplitude_damping(0.5)
    lifted = chn.lift(ad, I2 / 2)
    np.testing.assert_allclose(partial_trace_b(lifted.gamma_ab, 2, 2), chn.apply(ad, I2 / 2), atol=1e-15)
    lifted = chn.lift(chn.dephasing(0.3), projector(random_pure(rng, 2)))
    assert np.linalg.matrix_rank(lifted.gamma_ab, tol=1e-10) == 1


def test_lift_marginal_property(rng):
    for _ in range(200):
        ch = chn.random_channel(rng, int(rng.integers(1, 5)))
        rho = random_density(rng, 2, int(rng.integers(1, 3)))
        lifted = chn.lift(ch, rho)
        np.testing.assert_allclose(partial_trace_b(lifted.gamma_ab, *lifted.dims), chn.apply(ch, rho), atol=1e-12)
        v = ch.isometry()
        np.testing.assert_allclose(v.conj().T @ v, I2, atol=1e-12)


def test_bloch_affine_matches_apply(rng):
    from eofcap.states import bloch_from_qubit

    for _ in range(50):
        ch = chn.random_channel(rng)
        m, t = ch.bloch_affine()
        rho = random_density(rng, 2)
        np.testing.assert_allclose(m @ bloch_from_qubit(rho) + t, bloch_from_qubit(chn.apply(ch, rho)), atol=1e-12)


def test_capacity_identity_and_constant():
    _, res = solved("identity")
    assert res.capacity_bits == pytest.approx(1, abs=1e-6)
    members = [projector(m) for m in res.optimal_ensemble.members]
    assert len(members) == 2
    assert abs(np.trace(members[0] @ members[1])) < 1e-6
    _, res = solved("constant")
    assert res.capacity_bits == pytest.approx(0, abs=1e-9)


def test_capacity_depolarizing_against_grid():
    _, res = solved("depolarizing_p0.5")
    assert res.capacity_bits == pytest.approx(depolarizing_capacity(0.5), abs=1e-4)


@pytest.mark.parametrize("eta", [0.2, 0.3, 0.5])
def test_capacity_amplitude_damping_against_hull(eta):
    _, res = solved(f"ampdamp_eta{eta}")
    assert res.capacity_bits == pytest.approx(amplitude_damping_capacity(eta), abs=1e-3)
    assert res.equidistance_deviation <= 1e-4
    assert res.radius_gap <= 1e-4
    assert 0 <= res.capacity_bits <= 1


def test_radius_examples():
    assert chn.relative_entropy_radius(chn.identity_channel(), I2 / 2) == pytest.approx(1, abs=1e-9)
    sigma = np.diag([0.75, 0.25]).astype(complex)
    assert chn.relative_entropy_radius(chn.constant_channel(sigma), sigma) == pytest.approx(0, abs=1e-9)
    ch, res = solved("ampdamp_eta0.3")
    assert chn.relative_entropy_radius(ch, res.optimal_avg_output) == pytest.approx(res.capacity_bits, abs=1e-3)


def test_equidistance_examples():
    ens = Ensemble(np.array([0.5, 0.5]), (ket("0"), ket("1")))
    dev, c = chn.equidistance_check(chn.identity_channel(), ens, I2 / 2)
    assert dev == pytest.approx(0, abs=1e-12) and c == pytest.approx(1)
    sigma = np.diag([0.75, 0.25]).astype(complex)
    dev, c = chn.equidistance_check(chn.constant_channel(sigma), ens, sigma)
    assert dev == pytest.approx(0, abs=1e-12) and c == pytest.approx(0, abs=1e-12)


def test_msw_identity():
    rep = msw("identity")
    assert rep.gap_vs_capacity <= 1e-3
    assert rep.sup_value == pytest.approx(1, abs=1e-3)


@pytest.mark.parametrize("name", ["dephasing_q0.25", "ampdamp_eta0.4"])
def test_msw_two_kraus(name):
    rep = msw(name)
    assert rep.gap_vs_capacity <= 1e-3
    assert rep.msw_residual <= 2e-3
    # the lifted state at the argmax is entangled exactly as the MSW relation says
    ch, res = solved(name)
    g = chn.lift(ch, rep.argmax_input).gamma_ab
    assert concurrence(g).eof_bits == pytest.approx(rep.eof_at_argmax, abs=1e-9)


def test_msw_rejects_wide_channels():
    with pytest.raises(ValueError):
        chn.msw_crosscheck(chn.depolarizing(0.5), 10)


def test_representability_symmetric_channels():
    for name in ("identity", "dephasing_q0.25"):
        ch, res = solved(name)
        spread, verdict = chn.representability_probe(ch, res)
        assert spread <= 1e-6 and verdict == chn.HOLDS

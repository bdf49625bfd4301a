"""Two-qubit concurrence, entanglement of formation and optimal decompositions.

The construction follows Wootters: subnormalised eigenvectors of the
state are Takagi-rotated so that the spin-flip overlap matrix becomes
``diag(lambda)``; the subdominant vectors are multiplied by ``i`` and a real
orthogonal mixing then equalises every member's concurrence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionError, DimensionError
from .matcore import hermitian_eig, kron, max_abs, partial_trace_b, takagi
from .states import (
    SIGMA_Y,
    Ensemble,
    binary_entropy,
    binary_entropy_array,
    check_density,
    check_pure,
    projector,
    von_neumann_entropy,
)

SIGMA_YY = kron(SIGMA_Y, SIGMA_Y)
# eigenvalues of the state at or below this are treated as exact zeros
RANK_TOL = 1e-13
EQUALIZE_TOL = 1e-10


def _check_two_qubit(g) -> np.ndarray:
    g = check_density(g)
    if g.shape != (4, 4):
        raise DimensionError(f"two-qubit state must be 4x4, got {g.shape}")
    return g


def spin_flip(g) -> np.ndarray:
    g = _check_two_qubit(g)
    return SIGMA_YY @ g.conj() @ SIGMA_YY


@dataclass(frozen=True)
class ConcurrenceReport:
    lambdas: np.ndarray
    concurrence: float
    eof_bits: float


def eof_from_concurrence(c: float) -> float:
    c = min(max(float(c), 0.0), 1.0)
    return binary_entropy(np.sqrt(max(0.0, 1.0 - c * c)))


def _subnormalized_eigenvectors(g: np.ndarray) -> np.ndarray:
    spec = hermitian_eig(g)
    keep = spec.eigenvalues > RANK_TOL
    return spec.eigenvectors[:, keep] * np.sqrt(spec.eigenvalues[keep])


def concurrence(g) -> ConcurrenceReport:
    """Concurrence and EoF of a two-qubit density matrix.

    The ``lambda_i`` are the eigenvalues of ``(sqrt(g) g~ sqrt(g))^(1/2)``,
    obtained here as the Takagi values of the spin-flip overlap matrix of
    the subnormalised eigenvectors (same numbers, without squaring away
    half the precision).
    """
    g = _check_two_qubit(g)
    v = _subnormalized_eigenvectors(g)
    lam = np.zeros(4)
    if v.shape[1]:
        s, _ = takagi(v.T @ SIGMA_YY @ v)
        lam[: len(s)] = s
    lam = np.sort(lam)[::-1]
    mu = max(0.0, lam[0] - lam[1] - lam[2] - lam[3])
    return ConcurrenceReport(lam, mu, eof_from_concurrence(mu))


def concurrence_batch(gammas) -> np.ndarray:
    """Concurrences for a stack of 4x4 states (LAPACK route, no validation)."""
    gammas = np.asarray(gammas, dtype=complex)
    vals, vecs = np.linalg.eigh(gammas)
    vals = np.where(vals > RANK_TOL, vals, 0.0)
    v = vecs * np.sqrt(vals)[..., None, :]
    k = np.swapaxes(v, -1, -2) @ SIGMA_YY @ v
    s = np.linalg.svd(k, compute_uv=False)
    return np.maximum(0.0, s[..., 0] - s[..., 1] - s[..., 2] - s[..., 3])


def eof_batch(gammas) -> np.ndarray:
    c = np.clip(concurrence_batch(gammas), 0.0, 1.0)
    return binary_entropy_array(np.sqrt(1.0 - c * c))


def pure_concurrence(psi) -> float:
    psi = np.asarray(psi, dtype=complex).ravel()
    return float(abs(psi @ SIGMA_YY @ psi) / np.vdot(psi, psi).real)


def reduced_density(psi) -> np.ndarray:
    psi = check_pure(psi)
    if psi.shape != (4,):
        raise DimensionError("reduced_density expects a two-qubit state vector")
    return partial_trace_b(projector(psi), 2, 2)


def schmidt_diagonality_check(psi, tol: float = 1e-8) -> tuple[bool, float]:
    """Whether the reduction of ``psi`` is diagonal in the computational basis.

    Equivalently ``psi = a|0>|phi1> + b|1>|phi2>`` with ``<phi1|phi2> = 0``;
    the residual is ``|<phi1|phi2>|``, the off-diagonal of the reduction.
    """
    resid = float(abs(reduced_density(psi)[0, 1]))
    return resid <= tol, resid


@dataclass(frozen=True)
class OptimalDecomposition:
    ensemble: Ensemble
    per_member_concurrence: np.ndarray
    reduced_matrices: tuple
    report: ConcurrenceReport

    @property
    def eof_bits(self) -> float:
        return self.report.eof_bits

    def reconstruction_error(self, g) -> float:
        return max_abs(self.ensemble.average() - np.asarray(g))

    def member_entropies(self) -> np.ndarray:
        return np.array([von_neumann_entropy(w) for w in self.reduced_matrices])


def _bilinear(z: np.ndarray) -> np.ndarray:
    """Spin-flip bilinear form ``z_i^T sigma_yy z_j`` (pre-concurrences on the diagonal)."""
    return z.T @ SIGMA_YY @ z


def _equalize(z: np.ndarray, target: float) -> np.ndarray:
    """Real Givens mixing until every column has concurrence ``target``.

    With ``D = Re(z^T S z) - target * Re(z^dag z)`` traceless, each rotation
    zeroes the largest ``|D_aa|`` against the opposite-sign member of
    smallest ``|D_bb|``; a zeroed member is then frozen. At most ``r - 1``
    rotations are needed.
    """
    z = z.copy()
    r = z.shape[1]
    active = list(range(r))
    for _ in range(4 * r):
        d = np.real(_bilinear(z)) - target * np.real(z.conj().T @ z)
        diag = np.diag(d)
        scale = max(1.0, max_abs(diag))
        live = [i for i in active if abs(diag[i]) > 1e-15 * scale]
        if len(live) < 2:
            break
        a = max(live, key=lambda i: abs(diag[i]))
        partners = [i for i in live if np.sign(diag[i]) == -np.sign(diag[a])]
        if not partners:
            break
        b = min(partners, key=lambda i: abs(diag[i]))
        daa, dbb, dab = diag[a], diag[b], d[a, b]
        # D'_aa = cos^2 (D_aa + 2 t D_ab + t^2 D_bb) with t = tan(angle)
        disc = np.sqrt(dab * dab - daa * dbb)
        roots = [(-dab + disc) / dbb, (-dab - disc) / dbb]
        t = min(roots, key=abs)
        c = 1.0 / np.sqrt(1.0 + t * t)
        s = t * c
        za, zb = z[:, a].copy(), z[:, b].copy()
        z[:, a] = c * za + s * zb
        z[:, b] = -s * za + c * zb
        active.remove(a)
    return z


def _close_polygon(s: np.ndarray) -> np.ndarray:
    """Angles ``alpha`` with ``sum s_j exp(i alpha_j) = 0``.

    Requires ``s_1 <= s_2 + ... + s_r`` (sorted descending), which is the
    zero-concurrence condition.
    """
    r = len(s)
    if r == 1:
        return np.zeros(1)
    if r == 2:
        return np.array([0.0, np.pi])

    def apex(p, q, target):
        # angle of q relative to p so that |p + q e^{i beta}| = target
        if p * q == 0:
            return np.pi
        return np.arccos(np.clip((target**2 - p * p - q * q) / (2 * p * q), -1.0, 1.0))

    if r == 3:
        beta = apex(s[0], s[1], s[2])
        a, b = s[0], s[1] * np.exp(1j * beta)
        return np.array([0.0, beta, np.angle(-(a + b))])
    length = max(s[0] - s[1], s[2] - s[3], 0.0)
    beta = apex(s[0], s[1], length)
    a, b = s[0], s[1] * np.exp(1j * beta)
    e = -(a + b)
    if abs(e) < 1e-15 or s[2] == 0:
        return np.array([0.0, beta, 0.0, np.pi])
    cos_delta = (abs(e) ** 2 + s[2] ** 2 - s[3] ** 2) / (2 * abs(e) * s[2])
    c = s[2] * np.exp(1j * (np.angle(e) + np.arccos(np.clip(cos_delta, -1.0, 1.0))))
    return np.array([0.0, beta, np.angle(c), np.angle(e - c)])


_HADAMARD4 = 0.5 * np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]], dtype=float)
_HADAMARD2 = np.array([[1, 1], [1, -1]], dtype=float) / np.sqrt(2)


def _separable_members(x: np.ndarray, s: np.ndarray) -> np.ndarray:
    r = x.shape[1]
    alpha = _close_polygon(s)
    y = x * np.exp(0.5j * alpha)
    if r == 1:
        return y
    if r == 2:
        return y @ _HADAMARD2.T
    if r == 3:
        # no real 3x3 orthogonal matrix has all entries of modulus 1/sqrt3
        y = np.column_stack([y, np.zeros(4, dtype=complex)])
    return y @ _HADAMARD4.T


def optimal_decomposition(g) -> OptimalDecomposition:
    """Pure-state ensemble attaining the EoF, every member at equal concurrence."""
    g = _check_two_qubit(g)
    report = concurrence(g)
    v = _subnormalized_eigenvectors(g)
    s, w = takagi(v.T @ SIGMA_YY @ v)
    order = np.argsort(-s, kind="stable")
    s, w = s[order], w[:, order]
    x = v @ w.conj()
    excess = s[0] - s[1:].sum()

    if excess > 1e-14:
        y = x * np.array([1.0] + [1j] * (len(s) - 1))
        pre = np.real(np.trace(_bilinear(y)))
        norm = np.real(np.trace(y.conj().T @ y))
        z = _equalize(y, pre / norm)
    else:
        z = _separable_members(x, s)

    weights = np.real(np.sum(np.abs(z) ** 2, axis=0))
    keep = weights > 1e-14
    z, weights = z[:, keep], weights[keep]
    order = np.argsort(-weights, kind="stable")
    z, weights = z[:, order], weights[order]
    members = []
    for i in range(z.shape[1]):
        psi = z[:, i] / np.sqrt(weights[i])
        k = int(np.argmax(np.abs(psi) > np.abs(psi).max() - 1e-12))
        members.append(psi * np.conj(psi[k]) / abs(psi[k]))
    weights = weights / weights.sum()

    ens = Ensemble(weights, tuple(members))
    conc = np.array([pure_concurrence(m) for m in members])
    reduced = tuple(partial_trace_b(projector(m), 2, 2) for m in members)
    decomp = OptimalDecomposition(ens, conc, reduced, report)

    recon = decomp.reconstruction_error(g)
    conc_dev = max_abs(conc - report.concurrence)
    ent_dev = max_abs(decomp.member_entropies() - report.eof_bits)
    if recon > 1e-9 or conc_dev > 1e-8 or ent_dev > 1e-8:
        raise DecompositionError(
            f"invariants violated: reconstruction {recon:.2e}, "
            f"concurrence {conc_dev:.2e}, entropy {ent_dev:.2e}"
        )
    return decomp

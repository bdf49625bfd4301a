"""Density matrices, ensembles and entropy functionals (all in bits)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import xlogy

from .errors import InvalidStateError, NotHermitianError, NotPSDError
from .matcore import HERMITIAN_TOL, as_matrix, hermitian_eig

STATE_TOL = 1e-10
# 0 log 0 := 0 below this eigenvalue
ENTROPY_FLOOR = 1e-15
SUPPORT_EIG_TOL = 1e-12
SUPPORT_RESIDUAL_TOL = 1e-8

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def check_density(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Validate a density matrix and return it as a complex array."""
    try:
        rho = as_matrix(rho)
    except ValueError as exc:
        raise InvalidStateError(str(exc)) from exc
    if rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got {rho.shape}")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise InvalidStateError(f"trace {tr.real:.12g} differs from 1")
    try:
        lam = hermitian_eig(rho, HERMITIAN_TOL).eigenvalues
    except NotHermitianError as exc:
        raise InvalidStateError(str(exc)) from exc
    if lam.min() < -tol:
        raise InvalidStateError(f"negative eigenvalue {lam.min():.3e}")
    return rho


def check_pure(psi, tol: float = STATE_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > tol:
        raise InvalidStateError(f"state vector has norm {norm:.12g}")
    return psi


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def ket(label: str) -> np.ndarray:
    """Computational basis ket from a bit string, e.g. ``ket("01")``."""
    vec = np.zeros(2 ** len(label), dtype=complex)
    vec[int(label, 2)] = 1.0
    return vec


def bell_state(index: int) -> np.ndarray:
    """``|beta_0> = (|00>+|11>)/sqrt2`` or ``|beta_3> = (sigma_z x I)|beta_0>``."""
    if index == 0:
        return (ket("00") + ket("11")) / np.sqrt(2)
    if index == 3:
        return (ket("00") - ket("11")) / np.sqrt(2)
    raise ValueError(f"unsupported Bell index {index}; use 0 or 3")


@dataclass(frozen=True)
class Ensemble:
    """Probability weights over same-sized members.

    Members are either 1-D state vectors (pure) or 2-D density matrices.
    """

    weights: np.ndarray
    members: tuple = field(default_factory=tuple)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        if len(w) != len(self.members) or len(w) == 0:
            raise InvalidStateError("ensemble needs one weight per member")
        if np.any(w < -STATE_TOL) or abs(w.sum() - 1) > STATE_TOL:
            raise InvalidStateError(f"weights must be a probability vector, got {w}")
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))
        object.__setattr__(self, "members", tuple(np.asarray(m, dtype=complex) for m in self.members))
        dims = {self.density(i).shape for i in range(len(w))}
        if len(dims) != 1:
            raise InvalidStateError(f"members have mismatched shapes {dims}")

    def __len__(self) -> int:
        return len(self.members)

    def density(self, i: int) -> np.ndarray:
        m = self.members[i]
        return projector(m) if m.ndim == 1 else m

    def densities(self) -> list[np.ndarray]:
        return [self.density(i) for i in range(len(self))]

    def average(self) -> np.ndarray:
        return sum(w * d for w, d in zip(self.weights, self.densities()))

    def mapped(self, fn) -> "Ensemble":
        """Ensemble with ``fn`` applied to every member density."""
        return Ensemble(self.weights, tuple(fn(d) for d in self.densities()))


def _eigvals(rho) -> np.ndarray:
    return hermitian_eig(rho).eigenvalues


def _entropy_from_eigs(lam: np.ndarray) -> float:
    lam = lam[lam > ENTROPY_FLOOR]
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(rho) -> float:
    return _entropy_from_eigs(_eigvals(rho))


def binary_entropy(x: float) -> float:
    """Entropy of the qubit spectrum ``(1 +- x)/2``."""
    if abs(x) > 1 + STATE_TOL:
        raise ValueError(f"|x| = {abs(x)} exceeds 1")
    x = min(abs(float(x)), 1.0)
    p, q = (1 + x) / 2, (1 - x) / 2
    return float(-(xlogy(p, p) + xlogy(q, q)) / np.log(2))


def binary_entropy_array(x) -> np.ndarray:
    """Vectorised :func:`binary_entropy` with clipping to ``[0, 1]``."""
    x = np.clip(np.abs(x), 0.0, 1.0)
    p, q = (1 + x) / 2, (1 - x) / 2
    return -(xlogy(p, p) + xlogy(q, q)) / np.log(2)


def relative_entropy(omega, rho) -> float:
    """``Tr omega (log omega - log rho)`` in bits, or ``inf`` off support."""
    omega, rho = as_matrix(omega), as_matrix(rho)
    if omega.shape != rho.shape:
        raise ValueError(f"shape mismatch {omega.shape} vs {rho.shape}")
    so, sr = hermitian_eig(omega), hermitian_eig(rho)
    supp = sr.eigenvectors[:, sr.eigenvalues > SUPPORT_EIG_TOL]
    for lam, vec in zip(so.eigenvalues, so.eigenvectors.T):
        if lam > SUPPORT_EIG_TOL:
            resid = vec - supp @ (supp.conj().T @ vec)
            if np.linalg.norm(resid) > SUPPORT_RESIDUAL_TOL:
                return float("inf")
    neg_s = -_entropy_from_eigs(so.eigenvalues)
    cross = 0.0
    for lam, vec in zip(sr.eigenvalues, sr.eigenvectors.T):
        if lam > SUPPORT_EIG_TOL:
            cross += np.log2(lam) * np.real(np.vdot(vec, omega @ vec))
    return float(max(neg_s - cross, 0.0))


def holevo_quantity(ens: Ensemble) -> float:
    avg_s = von_neumann_entropy(ens.average())
    return float(avg_s - sum(w * von_neumann_entropy(d) for w, d in zip(ens.weights, ens.densities())))


def mixing_identity_residual(ens: Ensemble) -> float:
    """Gap between the Holevo quantity and the weighted divergence from the mean."""
    avg = ens.average()
    rhs = sum(w * relative_entropy(d, avg) for w, d in zip(ens.weights, ens.densities()) if w > 0)
    return abs(holevo_quantity(ens) - rhs)


def bloch_from_qubit(rho) -> np.ndarray:
    rho = check_density(rho)
    if rho.shape != (2, 2):
        raise InvalidStateError("Bloch vectors are defined for qubits only")
    return np.array([np.real(np.trace(rho @ s)) for s in PAULIS])


def qubit_from_bloch(r: Sequence[float]) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ValueError("Bloch vector must have three components")
    if np.linalg.norm(r) > 1 + STATE_TOL:
        raise InvalidStateError(f"Bloch vector norm {np.linalg.norm(r):.12g} exceeds 1")
    return 0.5 * (np.eye(2) + sum(c * s for c, s in zip(r, PAULIS)))


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a Ginibre ensemble of the given rank."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def is_density(rho, tol: float = STATE_TOL) -> bool:
    try:
        check_density(rho, tol)
    except (InvalidStateError, NotPSDError):
        return False
    return True


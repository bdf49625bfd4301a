"""The two-qubit counter-example and the equal-distance (Question 1) test.

If a state's reduction were the optimal average output of some channel,
with the EoF-optimal ensemble mapping onto an optimal output ensemble,
then ``Tr[omega_k log gamma_A]`` would have to be the same for every
member. For the state built here it is not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .matcore import hermitian_eig, matrix_log2, partial_trace_b
from .states import Ensemble, bell_state, check_density, ket, projector, von_neumann_entropy
from .wootters import OptimalDecomposition, concurrence, optimal_decomposition, pure_concurrence

NEGATIVE = "NEGATIVE"
INCONCLUSIVE = "INCONCLUSIVE"

DEFAULT_MARGIN = 0.1
# entropy agreement for our decomposition vs. the 4-decimal printed one
OUR_ENTROPY_TOL = 1e-6
PAPER_ENTROPY_TOL = 2e-3

_BASIS = {
    "bell0": bell_state(0),
    "bell3": bell_state(3),
    "ket00": ket("00"),
    "ket01": ket("01"),
    "ket10": ket("10"),
    "ket11": ket("11"),
}


def named_state(name: str) -> np.ndarray:
    try:
        return _BASIS[name]
    except KeyError:
        raise ValueError(f"unknown state name {name!r}; choose from {sorted(_BASIS)}") from None


def paper_state() -> np.ndarray:
    """``5/8 b0 + 1/16 b3 + 1/4 |01><01| + 1/16 |10><10|``."""
    return (
        5 / 8 * projector(_BASIS["bell0"])
        + 1 / 16 * projector(_BASIS["bell3"])
        + 1 / 4 * projector(_BASIS["ket01"])
        + 1 / 16 * projector(_BASIS["ket10"])
    )


@dataclass(frozen=True)
class PaperEnsemble:
    """Optimal ensemble as printed to four decimals.

    ``coefficients[k]`` are the amplitudes of member ``k`` on
    ``(bell0, bell3, ket01, ket10)``; ``phases[k]`` are the angles
    ``theta_k`` of the reduced-state off-diagonals.
    """

    weights: np.ndarray
    coefficients: np.ndarray
    phases: np.ndarray

    def vectors(self) -> list[np.ndarray]:
        basis = np.column_stack([_BASIS[n] for n in ("bell0", "bell3", "ket01", "ket10")])
        out = []
        for row in self.coefficients:
            v = basis @ row
            out.append(v / np.linalg.norm(v))
        return out

    def ensemble(self) -> Ensemble:
        w = np.asarray(self.weights, dtype=float)
        return Ensemble(w / w.sum(), tuple(self.vectors()))

    def reduced_matrices(self) -> list[np.ndarray]:
        return [partial_trace_b(projector(v), 2, 2) for v in self.vectors()]

    def member_concurrences(self) -> np.ndarray:
        return np.array([pure_concurrence(v) for v in self.vectors()])


def paper_ensemble() -> PaperEnsemble:
    e_plus, e_minus = np.exp(1j * np.pi / 3), np.exp(-1j * np.pi / 3)
    coeffs = np.array(
        [
            [0.8101, 0.5863, 0.0, 0.0],
            [-0.7870, 0.1087, 0.5432, 0.2716],
            [0.7870, -0.1087, 0.5432 * e_plus, 0.2716 * e_minus],
            [-0.7870, 0.1087, -0.5432 * e_minus, -0.2716 * e_plus],
        ],
        dtype=complex,
    )
    return PaperEnsemble(
        weights=np.array([0.1527, 0.2824, 0.2824, 0.2824]),
        coefficients=coeffs,
        phases=np.array([0.0, np.pi, np.pi / 3, -np.pi / 3]),
    )


def trace_log_form(d: float, x: float) -> float:
    """``Tr[omega log2 gamma_A]`` for ``gamma_A = diag((1+x)/2, (1-x)/2)``.

    Only the diagonal ``(1 +- d)/2`` of ``omega`` enters, linearly in ``d``.
    """
    if abs(x) >= 1:
        raise ValueError("|x| must be below 1 (log of a zero eigenvalue)")
    if abs(d) > 1:
        raise ValueError("|d| must not exceed 1")
    return (1 + d) / 2 * np.log2((1 + x) / 2) + (1 - d) / 2 * np.log2((1 - x) / 2)


@dataclass(frozen=True)
class QuestionOneVerdict:
    values: np.ndarray
    spread: float
    entropies: np.ndarray
    eof_bits: float
    verdict: str
    margin: float
    census: tuple[int, int]
    weights: np.ndarray

    @property
    def would_be_capacity(self) -> np.ndarray:
        """``H(omega_k, gamma_A) = -S(omega_k) - Tr omega_k log gamma_A`` per member.

        These would all equal the capacity of a channel realising the
        state, if one existed.
        """
        return -self.entropies - self.values


def _census(reduced, gamma_a, tol: float) -> tuple[int, int]:
    basis = hermitian_eig(gamma_a).eigenvectors
    diag = sum(1 for w in reduced if abs((basis.conj().T @ w @ basis)[0, 1]) <= tol)
    return diag, len(reduced) - diag


def diagonality_census(decomp, gamma_a, tol: float = 1e-6) -> tuple[int, int]:
    """Count members whose reduced state is diagonal in ``gamma_A``'s eigenbasis.

    ``decomp`` may be an :class:`OptimalDecomposition` or a
    :class:`PaperEnsemble`. When ``gamma_A`` is proportional to the identity
    the count is still reported, though every member then passes the
    equal-distance test trivially.
    """
    if isinstance(decomp, OptimalDecomposition):
        reduced = decomp.reduced_matrices
    elif isinstance(decomp, PaperEnsemble):
        reduced = decomp.reduced_matrices()
    else:
        reduced = list(decomp)
    return _census(reduced, gamma_a, tol)


def question_one_test(g, source: str = "ours", margin: float = DEFAULT_MARGIN) -> QuestionOneVerdict:
    """Evaluate ``Tr[omega_k log2 gamma_A]`` across an EoF-optimal ensemble.

    ``source="ours"`` decomposes ``g`` with the Wootters construction;
    ``source="paper"`` uses the printed ensemble and requires ``g`` to be
    :func:`paper_state`. The verdict is NEGATIVE when the values spread by
    more than ``margin`` bits while all member entropies equal the EoF.
    """
    g = check_density(g)
    if g.shape != (4, 4):
        raise DimensionError("question_one_test expects a two-qubit state")
    source = source.lower()
    eof = concurrence(g).eof_bits
    if source == "ours":
        decomp = optimal_decomposition(g)
        reduced, weights = list(decomp.reduced_matrices), decomp.ensemble.weights
        ent_tol = OUR_ENTROPY_TOL
    elif source == "paper":
        if np.max(np.abs(g - paper_state())) > 1e-12:
            raise ValueError("the printed ensemble only decomposes the counter-example state")
        pe = paper_ensemble()
        reduced, weights = pe.reduced_matrices(), pe.ensemble().weights
        ent_tol = PAPER_ENTROPY_TOL
    else:
        raise ValueError(f"unknown decomposition source {source!r}")

    gamma_a = partial_trace_b(g, 2, 2)
    log_a = matrix_log2(gamma_a)
    values = np.array([float(np.real(np.trace(w @ log_a))) for w in reduced])
    entropies = np.array([von_neumann_entropy(w) for w in reduced])
    spread = float(values.max() - values.min())
    equal_entropy = bool(np.all(np.abs(entropies - eof) <= ent_tol))
    verdict = NEGATIVE if spread > margin and equal_entropy else INCONCLUSIVE
    return QuestionOneVerdict(
        values, spread, entropies, eof, verdict, margin, _census(reduced, gamma_a, 1e-6), np.asarray(weights)
    )

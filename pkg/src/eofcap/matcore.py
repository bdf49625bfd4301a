"""Small dense complex-matrix primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The spectral
routines use a cyclic Jacobi eigensolver instead of LAPACK so that
eigenvector choices (and therefore every downstream decomposition) are
reproducible across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotHermitianError, NotPSDError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
JACOBI_TOL = 1e-13
# eigenvalues this close are treated as one degenerate cluster when ordering
DEGENERACY_TOL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def multiply(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product; the first factor is the slow index."""
    return np.kron(as_matrix(a), as_matrix(b))


def max_abs(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix is not square: {a.shape}")
    dev = max_abs(a - a.conj().T)
    if dev > tol:
        raise NotHermitianError(f"max |A - A^dag| = {dev:.3e} exceeds {tol:.1e}")
    return a


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order and matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _jacobi(a: np.ndarray, tol: float, max_sweeps: int = 100):
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=complex)
    scale = max(1.0, np.linalg.norm(a))
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a[offdiag])
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                mag = abs(b)
                if mag <= 1e-300:
                    continue
                # B = P M P^dag with M real symmetric, P = diag(1, e^{-i phi})
                phase = b / mag
                app, aqq = a[p, p].real, a[q, q].real
                theta = 0.5 * np.arctan2(2.0 * mag, app - aqq)
                c, s = np.cos(theta), np.sin(theta)
                u = np.array([[c, -s], [s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ u
    return np.real(np.diag(a)).copy(), v


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    mags = np.abs(vec)
    k = int(np.flatnonzero(mags >= mags.max() - DEGENERACY_TOL)[0])
    return vec * (np.conj(vec[k]) / mags[k])


def hermitian_eig(a, tol: float = HERMITIAN_TOL) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues are returned in descending order. Each eigenvector has its
    largest-magnitude component (first one, on ties) made real positive;
    eigenvectors inside a degenerate cluster are ordered lexicographically
    by the magnitudes of their components, earliest basis index first.
    """
    a = check_hermitian(a, tol)
    a = 0.5 * (a + a.conj().T)
    vals, vecs = _jacobi(a, JACOBI_TOL)
    vecs = np.column_stack([_fix_phase(vecs[:, i]) for i in range(len(vals))])

    order = list(np.argsort(-vals, kind="stable"))
    clusters: list[list[int]] = []
    for i in order:
        if clusters and abs(vals[clusters[-1][0]] - vals[i]) <= DEGENERACY_TOL:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    final = []
    for cl in clusters:
        key = lambda i: tuple(-np.round(np.abs(vecs[:, i]), 9))  # noqa: E731
        final.extend(sorted(cl, key=key))
    return Spectrum(vals[final], vecs[:, final])


def _psd_spectrum(a) -> Spectrum:
    spec = hermitian_eig(a)
    lam = spec.eigenvalues
    if lam.min() < -PSD_TOL:
        raise NotPSDError(f"eigenvalue {lam.min():.3e} below -{PSD_TOL:.0e}")
    return Spectrum(np.clip(lam, 0.0, None), spec.eigenvectors)


def matrix_sqrt(a) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues in [-1e-10, 0) are clipped."""
    spec = _psd_spectrum(a)
    return Spectrum(np.sqrt(spec.eigenvalues), spec.eigenvectors).reconstruct()


def matrix_log2(a, cutoff: float = 0.0) -> np.ndarray:
    """Base-2 logarithm on the support of a PSD matrix.

    Eigenvalues at or below ``cutoff`` contribute nothing; callers decide
    what a kernel direction means for their quantity.
    """
    spec = _psd_spectrum(a)
    lam = spec.eigenvalues
    logs = np.zeros_like(lam)
    mask = lam > cutoff
    logs[mask] = np.log2(lam[mask])
    return Spectrum(logs, spec.eigenvectors).reconstruct()


def partial_trace_b(g, dim_a: int, dim_b: int) -> np.ndarray:
    """Trace out the second (fast-index) factor of a bipartite operator."""
    g = as_matrix(g)
    n = dim_a * dim_b
    if g.shape != (n, n):
        raise DimensionError(f"expected {(n, n)} for dims ({dim_a}, {dim_b}), got {g.shape}")
    return np.einsum("ambm->ab", g.reshape(dim_a, dim_b, dim_a, dim_b))


def partial_trace_a(g, dim_a: int, dim_b: int) -> np.ndarray:
    g = as_matrix(g)
    n = dim_a * dim_b
    if g.shape != (n, n):
        raise DimensionError(f"expected {(n, n)} for dims ({dim_a}, {dim_b}), got {g.shape}")
    return np.einsum("mamb->ab", g.reshape(dim_a, dim_b, dim_a, dim_b))


def takagi(k) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorization ``K = W diag(s) W^T`` of a complex symmetric matrix.

    Uses the real symmetric embedding ``[[Re K, Im K], [Im K, -Re K]]``,
    whose spectrum is ``{+s_i, -s_i}``: an eigenvector ``[p; q]`` for
    ``+s`` gives the Takagi vector ``p + i q``. Vectors for vanishing
    ``s`` are taken from the kernel of ``conj(K)`` instead, because the
    ``+0``/``-0`` pairs cannot be told apart.
    """
    k = as_matrix(k)
    n = k.shape[0]
    if k.shape != (n, n):
        raise DimensionError("Takagi factorization needs a square matrix")
    if max_abs(k - k.T) > HERMITIAN_TOL:
        raise ValueError("matrix is not complex symmetric")
    re, im = k.real, k.imag
    emb = np.block([[re, im], [im, -re]])
    spec = hermitian_eig(emb.astype(complex))
    zero_tol = 1e-12 * max(1.0, max_abs(k))
    cols, svals = [], []
    for i in range(n):
        lam = spec.eigenvalues[i]
        if lam <= zero_tol:
            break
        pq = spec.eigenvectors[:, i].real
        # eigenvectors of a real matrix come back real after phase fixing
        cols.append(pq[:n] + 1j * pq[n:])
        svals.append(lam)
    missing = n - len(cols)
    if missing:
        kernel = hermitian_eig(k.conj().T @ k)
        for j in range(n - 1, n - 1 - missing, -1):
            w = np.conj(kernel.eigenvectors[:, j])
            for c in cols:
                w = w - np.vdot(c, w) * c
            cols.append(w / np.linalg.norm(w))
            svals.append(0.0)
    return np.array(svals), np.column_stack(cols)

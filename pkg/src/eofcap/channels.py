"""Qubit channels: Kraus application, Stinespring lifting and Holevo capacity.

Kraus convention: ``Phi(rho) = sum_k A_k rho A_k^dag`` with
``sum_k A_k^dag A_k = I``. Operators written the other way round
(``A_k^dag rho A_k``) are the same channel after relabelling
``A_k <-> A_k^dag``.

The capacity search works on Bloch vectors, where a qubit channel is the
affine map ``r -> M r + t`` and every entropy is a binary entropy of a
vector length. Results are then re-evaluated with the matrix routines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import CertificationError, InvalidChannelError
from .matcore import as_matrix, matrix_log2, matrix_sqrt, max_abs, partial_trace_b
from .states import (
    PAULIS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    Ensemble,
    binary_entropy_array,
    check_density,
    holevo_quantity,
    qubit_from_bloch,
    relative_entropy,
    von_neumann_entropy,
)
from .wootters import concurrence, eof_batch

COMPLETENESS_TOL = 1e-10

HOLDS = "NECESSARY-CONDITION-HOLDS"
VIOLATED = "VIOLATED"


@dataclass(frozen=True)
class KrausChannel:
    kraus_ops: tuple
    label: str = ""

    def __post_init__(self):
        try:
            ops = tuple(as_matrix(a) for a in self.kraus_ops)
        except ValueError as exc:
            raise InvalidChannelError(str(exc)) from exc
        if not 1 <= len(ops) <= 4:
            raise InvalidChannelError(f"expected 1 to 4 Kraus operators, got {len(ops)}")
        if any(a.shape != (2, 2) for a in ops):
            raise InvalidChannelError("Kraus operators must be 2x2")
        dev = max_abs(sum(a.conj().T @ a for a in ops) - np.eye(2))
        if dev > COMPLETENESS_TOL:
            raise InvalidChannelError(f"completeness violated by {dev:.3e}")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def n_kraus(self) -> int:
        return len(self.kraus_ops)

    @property
    def env_dim(self) -> int:
        return max(2, self.n_kraus)

    def isometry(self) -> np.ndarray:
        """``V = sum_j A_j (x) |j>``, a ``(2 d_E) x 2`` isometry.

        The environment dimension is ``d_E = max(2, n_kraus)`` so that even a
        unitary channel lifts to a two-qubit state.
        """
        n = self.env_dim
        return sum(np.kron(a, np.eye(n)[:, [j]]) for j, a in enumerate(self.kraus_ops))

    def bloch_affine(self) -> tuple[np.ndarray, np.ndarray]:
        """``(M, t)`` with ``Phi((I + r.sigma)/2) = (I + (M r + t).sigma)/2``."""
        m = np.array([[np.real(np.trace(si @ _map(self, sj))) / 2 for sj in PAULIS] for si in PAULIS])
        t = np.array([np.real(np.trace(si @ _map(self, np.eye(2)))) / 2 for si in PAULIS])
        return m, t


def _map(ch: KrausChannel, x: np.ndarray) -> np.ndarray:
    return sum(a @ x @ a.conj().T for a in ch.kraus_ops)


def apply(ch: KrausChannel, rho) -> np.ndarray:
    rho = check_density(rho)
    return _map(ch, rho)


@dataclass(frozen=True)
class LiftedState:
    gamma_ab: np.ndarray
    input: np.ndarray
    dims: tuple = (2, 1)


def lift(ch: KrausChannel, rho) -> LiftedState:
    """Bipartite state ``sum_jk A_j rho A_k^dag (x) |j><k| = V rho V^dag``.

    The environment starts in ``|0><0|``; the unitary of the dilation is
    never built because only its action on that reference state matters.
    """
    rho = check_density(rho)
    v = ch.isometry()
    return LiftedState(v @ rho @ v.conj().T, rho, (2, ch.env_dim))


# ---------------------------------------------------------------- channels


def identity_channel() -> KrausChannel:
    return KrausChannel((np.eye(2),), "identity")


def depolarizing(p: float) -> KrausChannel:
    """``(1 - p) rho + p I/2``."""
    ops = [np.sqrt(1 - 3 * p / 4) * np.eye(2)] + [np.sqrt(p / 4) * s for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)]
    return KrausChannel(tuple(ops), f"depolarizing p={p:g}")


def amplitude_damping(eta: float) -> KrausChannel:
    a0 = np.diag([1.0, np.sqrt(1 - eta)])
    a1 = np.sqrt(eta) * np.array([[0.0, 1.0], [0.0, 0.0]])
    return KrausChannel((a0, a1), f"amplitude damping eta={eta:g}")


def dephasing(q: float) -> KrausChannel:
    return KrausChannel((np.sqrt(1 - q) * np.eye(2), np.sqrt(q) * SIGMA_Z), f"dephasing q={q:g}")


def constant_channel(sigma) -> KrausChannel:
    """Replace every input by ``sigma``: Kraus ``sqrt(sigma)|i><j|``."""
    root = matrix_sqrt(check_density(sigma))
    ops = []
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2))
            e[i, j] = 1.0
            ops.append(root @ e)
    return KrausChannel(tuple(ops), "constant")


def random_channel(rng: np.random.Generator, n_kraus: int = 4, label: str = "random") -> KrausChannel:
    """Channel from a Haar-random isometry into ``C^2 (x) C^n``."""
    g = rng.normal(size=(2 * n_kraus, 2)) + 1j * rng.normal(size=(2 * n_kraus, 2))
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    blocks = q.reshape(2, n_kraus, 2)
    return KrausChannel(tuple(blocks[:, j, :] for j in range(n_kraus)), label)


def random_nonunital_channel(rng: np.random.Generator, min_shift: float = 0.1) -> KrausChannel:
    """Random 4-Kraus channel whose Bloch image is translated by at least ``min_shift``."""
    while True:
        ch = random_channel(rng, 4, "random non-unital")
        _, t = ch.bloch_affine()
        if np.linalg.norm(t) >= min_shift:
            return ch


# ------------------------------------------------------------ bloch helpers


def _bloch_points(theta, phi) -> np.ndarray:
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def _pure_from_angles(theta: float, phi: float) -> np.ndarray:
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    phi = np.pi * (1 + np.sqrt(5)) * i
    rho = np.sqrt(1 - z * z)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def bloch_relative_entropy(a, c) -> np.ndarray:
    """``H(omega_a, omega_c)`` in bits for rows of Bloch vectors ``a``."""
    a = np.atleast_2d(a)
    c = np.asarray(c, dtype=float)
    s_a = binary_entropy_array(np.linalg.norm(a, axis=1))
    clen = np.linalg.norm(c)
    if clen < 1e-14:
        return -s_a + 1.0
    n = c / clen
    proj = a @ n
    up, down = (1 + clen) / 2, (1 - clen) / 2
    p_up, p_down = (1 + proj) / 2, (1 - proj) / 2
    with np.errstate(divide="ignore"):
        log_down = np.log2(down) if down > 0 else -np.inf
    cross = p_up * np.log2(up) + np.where(p_down > 1e-15, p_down * log_down, 0.0)
    return -s_a - cross


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1
    k = np.arange(1, len(v) + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


# --------------------------------------------------------- capacity solver


@dataclass(frozen=True)
class SolverConfig:
    n_members: int = 4
    restarts: int = 32
    seed: int = 0
    improvement_tol: float = 1e-12
    radius_points: int = 20000
    certify_tol: float = 1e-4
    max_rounds: int = 3
    prune_weight: float = 1e-4


@dataclass(frozen=True)
class CapacityResult:
    capacity_bits: float
    optimal_ensemble: Ensemble
    optimal_avg_output: np.ndarray
    equidistance_deviation: float
    radius_gap: float
    iterations: int
    radius: float = float("nan")
    channel_label: str = ""

    @property
    def optimal_avg_input(self) -> np.ndarray:
        return self.optimal_ensemble.average()


def _h(x: float) -> float:
    if x >= 1.0:
        return 0.0
    p, q = 0.5 * (1 + x), 0.5 * (1 - x)
    return -(p * math.log2(p) + q * math.log2(q))


class _Objective:
    """Negative output Holevo quantity; scalar ``math`` code since n <= 4."""

    def __init__(self, m_aff: np.ndarray, t_aff: np.ndarray, n: int):
        self.m, self.t, self.n = m_aff, t_aff, n
        self._m = m_aff.tolist()
        self._t = t_aff.tolist()

    def unpack(self, x):
        n = self.n
        return x[:n], x[n : 2 * n], _project_simplex(np.asarray(x[2 * n :]))

    def chi(self, x) -> float:
        n = self.n
        xs = x.tolist() if isinstance(x, np.ndarray) else list(x)
        w = _project_simplex_list(xs[2 * n :])
        (m00, m01, m02), (m10, m11, m12), (m20, m21, m22) = self._m
        t0, t1, t2 = self._t
        ax = ay = az = 0.0
        member = 0.0
        for k in range(n):
            th, ph, wk = xs[k], xs[n + k], w[k]
            st = math.sin(th)
            rx, ry, rz = st * math.cos(ph), st * math.sin(ph), math.cos(th)
            ox = m00 * rx + m01 * ry + m02 * rz + t0
            oy = m10 * rx + m11 * ry + m12 * rz + t1
            oz = m20 * rx + m21 * ry + m22 * rz + t2
            ax += wk * ox
            ay += wk * oy
            az += wk * oz
            member += wk * _h(math.sqrt(ox * ox + oy * oy + oz * oz))
        return _h(math.sqrt(ax * ax + ay * ay + az * az)) - member

    def __call__(self, x) -> float:
        return -self.chi(x)


def _project_simplex_list(v: list) -> list:
    u = sorted(v, reverse=True)
    css, tau = 0.0, 0.0
    for k, uk in enumerate(u, start=1):
        css += uk
        if uk - (css - 1) / k > 0:
            tau = (css - 1) / k
    return [max(vi - tau, 0.0) for vi in v]


def _nelder_mead(obj: _Objective, x0: np.ndarray, step: float, fatol: float, maxfev: int):
    simplex = np.vstack([x0] + [x0 + step * e for e in np.eye(len(x0))])
    res = minimize(
        obj,
        x0,
        method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": 1e-11, "fatol": fatol, "maxfev": maxfev, "adaptive": True},
    )
    return res.x, -res.fun, res.nit


def _polish(obj: _Objective, x: np.ndarray, tol: float) -> tuple[np.ndarray, float, int]:
    best = obj.chi(x)
    iters = 0
    for _ in range(30):
        x_new, val, nit = _nelder_mead(obj, x, 0.02, 1e-15, 20000)
        iters += nit
        if val <= best + tol:
            if val > best:
                x, best = x_new, val
            break
        x, best = x_new, val
    return x, best, iters


def _prune(obj: _Objective, x: np.ndarray, min_weight: float) -> tuple[_Objective, np.ndarray]:
    theta, phi, w = obj.unpack(x)
    keep = w >= min_weight
    # merge members sitting on the same Bloch point
    pts = _bloch_points(theta, phi)
    idx = [i for i in range(len(w)) if keep[i]]
    merged: list[int] = []
    wk = w.copy()
    for i in idx:
        for j in merged:
            if np.linalg.norm(pts[i] - pts[j]) < 1e-6:
                wk[j] += wk[i]
                break
        else:
            merged.append(i)
    wk = wk[merged] / wk[merged].sum()
    sub = _Objective(obj.m, obj.t, len(merged))
    return sub, np.concatenate([theta[merged], phi[merged], wk])


def _search(ch: KrausChannel, cfg: SolverConfig, seed: int):
    m_aff, t_aff = ch.bloch_affine()
    n = cfg.n_members
    obj = _Objective(m_aff, t_aff, n)
    rng = np.random.default_rng(seed)
    best_x, best_val, iters = None, -np.inf, 0
    for _ in range(cfg.restarts):
        x0 = np.concatenate(
            [np.arccos(rng.uniform(-1, 1, n)), rng.uniform(0, 2 * np.pi, n), rng.dirichlet(np.ones(n))]
        )
        x, val, nit = _nelder_mead(obj, x0, 0.3, 1e-8, 2000)
        iters += nit
        # strict comparison keeps the lowest restart index on ties
        if val > best_val + 1e-13:
            best_x, best_val = x, val
    x, _, nit = _polish(obj, best_x, cfg.improvement_tol)
    iters += nit
    sub, xs = _prune(obj, x, cfg.prune_weight)
    xs, _, nit = _polish(sub, xs, cfg.improvement_tol)
    iters += nit
    theta, phi, w = sub.unpack(xs)
    keep = w > 0
    members = tuple(_pure_from_angles(a, b) for a, b in zip(theta[keep], phi[keep]))
    return Ensemble(w[keep] / w[keep].sum(), members), iters


def holevo_capacity(ch: KrausChannel, config: SolverConfig | None = None) -> CapacityResult:
    """Maximise the output Holevo quantity over pure-input ensembles.

    Multi-start Nelder-Mead over Bloch angles and simplex-projected weights,
    followed by pruning of negligible members and a final polish. The result
    carries two optimality certificates: the spread of output divergences
    from the mean output, and the gap to the relative-entropy radius.
    """
    cfg = config or SolverConfig()
    best = None
    total_iters = 0
    for rnd in range(cfg.max_rounds):
        ens, iters = _search(ch, cfg, cfg.seed + 7919 * rnd)
        total_iters += iters
        out_ens = ens.mapped(lambda d: _map(ch, d))
        cap = holevo_quantity(out_ens)
        center = out_ens.average()
        dev, _ = equidistance_check(ch, ens, center)
        radius = relative_entropy_radius(ch, center, cfg.radius_points)
        gap = abs(radius - cap)
        result = CapacityResult(cap, ens, center, dev, gap, total_iters, radius, ch.label)
        if best is None or result.capacity_bits > best.capacity_bits + 1e-12:
            best = result
        if gap <= cfg.certify_tol:
            return result
    raise CertificationError(
        f"radius gap {best.radius_gap:.3e} exceeds {cfg.certify_tol:.1e} after {cfg.max_rounds} rounds"
    )


def relative_entropy_radius(ch: KrausChannel, center, n_points: int = 20000, refine: bool = True) -> float:
    """Largest ``H(Phi(omega), center)`` over pure inputs ``omega``.

    Evaluated on a Fibonacci sphere and refined locally from the best few
    grid points. Mixed inputs are never larger (convexity).
    """
    center = check_density(center)
    c = np.array([np.real(np.trace(center @ s)) for s in PAULIS])
    m_aff, t_aff = ch.bloch_affine()
    pts = fibonacci_sphere(n_points)
    vals = bloch_relative_entropy(pts @ m_aff.T + t_aff, c)
    best = float(np.max(vals))
    if not refine or not np.isfinite(best):
        return best

    def neg(x):
        return -float(bloch_relative_entropy(_bloch_points(x[0], x[1])[None, :] @ m_aff.T + t_aff, c)[0])

    for i in np.argsort(-vals)[:3]:
        p = pts[i]
        x0 = np.array([np.arccos(np.clip(p[2], -1, 1)), np.arctan2(p[1], p[0])])
        res = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
        best = max(best, -res.fun)
    return best


def equidistance_check(ch: KrausChannel, ens: Ensemble, center) -> tuple[float, float]:
    """Return ``(max_k |H(Phi(rho_k), center) - chi|, chi)`` over weighted members."""
    out_ens = ens.mapped(lambda d: _map(ch, d))
    chi = holevo_quantity(out_ens)
    dists = [relative_entropy(d, center) for w, d in zip(out_ens.weights, out_ens.densities()) if w > 0]
    return float(max(abs(h - chi) for h in dists)), chi


# -------------------------------------------------------------- MSW check


@dataclass(frozen=True)
class MSWReport:
    sup_value: float
    argmax_input: np.ndarray
    gap_vs_capacity: float
    capacity: float
    eof_at_argmax: float
    msw_residual: float
    marginal_deviation: float
    grid: int
    grid_sup: float = field(default=float("nan"))


def _ball_points(grid: int) -> np.ndarray:
    axis = np.linspace(-1.0, 1.0, grid)
    pts = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    return pts[np.linalg.norm(pts, axis=1) <= 1.0]


def _msw_values(ch: KrausChannel, pts: np.ndarray, m_aff, t_aff, chunk: int = 20000) -> np.ndarray:
    v = ch.isometry()
    out = np.empty(len(pts))
    for start in range(0, len(pts), chunk):
        r = pts[start : start + chunk]
        rho = 0.5 * (np.eye(2) + np.einsum("ni,ijk->njk", r, np.array(PAULIS)))
        gam = v @ rho @ v.conj().T
        s_out = binary_entropy_array(np.linalg.norm(r @ m_aff.T + t_aff, axis=1))
        out[start : start + chunk] = s_out - eof_batch(gam)
    return out


def msw_crosscheck(
    ch: KrausChannel,
    grid: int = 50,
    capacity: CapacityResult | None = None,
    config: SolverConfig | None = None,
) -> MSWReport:
    """Sweep ``S(Tr_B gamma) - EoF(gamma)`` over lifted inputs and compare to capacity.

    Only channels with at most two Kraus operators qualify, so that the
    lifted state is a two-qubit state with a closed-form EoF.
    """
    if ch.n_kraus > 2:
        raise ValueError(f"MSW cross-check needs at most 2 Kraus operators, channel has {ch.n_kraus}")
    if capacity is None:
        capacity = holevo_capacity(ch, config)
    m_aff, t_aff = ch.bloch_affine()
    pts = _ball_points(grid)
    vals = _msw_values(ch, pts, m_aff, t_aff)
    grid_sup = float(vals.max())

    def neg(r):
        n = np.linalg.norm(r)
        if n > 1:
            r = r / n
        return -float(_msw_values(ch, r[None, :], m_aff, t_aff)[0])

    best_val, best_r = grid_sup, pts[int(np.argmax(vals))]
    for i in np.argsort(-vals)[:3]:
        res = minimize(neg, pts[i], method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14, "maxfev": 4000})
        if -res.fun > best_val:
            best_val, best_r = -res.fun, res.x / max(1.0, np.linalg.norm(res.x))

    rho_star = qubit_from_bloch(best_r)
    gamma = lift(ch, rho_star).gamma_ab
    eof_star = concurrence(gamma).eof_bits
    cap = capacity.capacity_bits
    center = capacity.optimal_avg_output
    residual = abs(eof_star - von_neumann_entropy(center) + cap)
    marginal = max_abs(partial_trace_b(gamma, 2, 2) - center)
    return MSWReport(best_val, rho_star, abs(best_val - cap), cap, eof_star, residual, marginal, grid, grid_sup)


# ------------------------------------------------------ representability


def representability_probe(ch: KrausChannel, result: CapacityResult, tol: float = 1e-5) -> tuple[float, str]:
    """Spread over the optimal ensemble of ``Tr Phi(rho_k) log2 Phi(rho_opt)``.

    A qubit environment (possibly in a mixed reference state) forces this
    quantity to be constant in ``k``; a spread above ``tol`` rules it out.
    """
    log_center = matrix_log2(result.optimal_avg_output, cutoff=1e-15)
    vals = [
        float(np.real(np.trace(_map(ch, d) @ log_center)))
        for w, d in zip(result.optimal_ensemble.weights, result.optimal_ensemble.densities())
        if w > 0
    ]
    spread = max(vals) - min(vals)
    return spread, (HOLDS if spread <= tol else VIOLATED)

"""
Cyclic Jacobi eigensolver for dense real symmetric matrices.

Each sweep visits every pair (p, q) once, in round-robin order: a round
holds n/2 disjoint pairs whose Givens rotations commute, so a whole round
is applied with vectorized row/column updates.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps


@dataclass
class JacobiResult:
    """Eigen-decomposition a = V diag(eigenvalues) V^T."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int
    off_norm: float
    converged: bool


def _round_robin(n: int):
    """Rounds of disjoint index pairs covering every pair of range(n) exactly once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            rounds.append((np.array([a for a, _ in pairs]), np.array([b for _, b in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    return math.sqrt(2.0) * float(np.linalg.norm(np.triu(a, 1)))


def _negligible(apq: np.ndarray, app: np.ndarray, aqq: np.ndarray) -> np.ndarray:
    """Off-diagonal entries below rounding level of their diagonal pair."""
    return np.abs(apq) <= EPS * np.sqrt(np.abs(app * aqq))


def _is_diagonal(a: np.ndarray) -> bool:
    P, Q = np.triu_indices(a.shape[0], 1)
    diag = np.diag(a)
    return bool(np.all(_negligible(a[P, Q], diag[P], diag[Q])))


def jacobi_eigh(
    a: np.ndarray,
    tol: float = 1e-14,
    atol: float = 0.0,
    max_sweeps: int = 60,
) -> JacobiResult:
    """
    Diagonalize a symmetric matrix by cyclic Jacobi rotations.

    Converged means either the off-diagonal Frobenius norm is at most
    max(tol * ||a||_F, atol), or every off-diagonal entry satisfies
    |a_pq| <= eps * sqrt(|a_pp a_qq|); such entries are never rotated.

    Args:
        a: Symmetric (n, n) array (not modified)
        tol: Relative stopping level for the off-diagonal norm
        atol: Absolute floor for the same test
        max_sweeps: Sweep limit

    Returns:
        JacobiResult with eigenvalues in ascending order
    """
    A = np.array(a, dtype=float, copy=True)
    n = A.shape[0]
    if A.ndim != 2 or A.shape != (n, n):
        raise ValueError(f"Expected a square matrix, got shape {A.shape}")
    V = np.eye(n)
    threshold = max(tol * float(np.linalg.norm(A)), atol)
    rounds = _round_robin(n)

    def done(off_norm: float) -> bool:
        return off_norm <= threshold or _is_diagonal(A)

    sweeps = 0
    off = _off_norm(A)
    while not done(off) and sweeps < max_sweeps:
        for P, Q in rounds:
            app = A[P, P]
            aqq = A[Q, Q]
            apq = A[P, Q]
            active = ~_negligible(apq, app, aqq)
            if not np.any(active):
                continue
            P, Q = P[active], Q[active]
            app, aqq, apq = app[active], aqq[active], apq[active]
            # tan(theta) as the smaller root of t^2 + 2 tau t - 1 = 0
            tau = (aqq - app) / (2.0 * apq)
            t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.hypot(1.0, t)
            s = t * c

            rows_p = A[P, :].copy()
            rows_q = A[Q, :]
            A[P, :] = c[:, None] * rows_p - s[:, None] * rows_q
            A[Q, :] = s[:, None] * rows_p + c[:, None] * rows_q

            cols_p = A[:, P].copy()
            cols_q = A[:, Q]
            A[:, P] = c[None, :] * cols_p - s[None, :] * cols_q
            A[:, Q] = s[None, :] * cols_p + c[None, :] * cols_q
            A[P, Q] = 0.0
            A[Q, P] = 0.0

            vp = V[:, P].copy()
            vq = V[:, Q]
            V[:, P] = c[None, :] * vp - s[None, :] * vq
            V[:, Q] = s[None, :] * vp + c[None, :] * vq
        sweeps += 1
        off = _off_norm(A)
        logger.debug(f"Jacobi sweep {sweeps}: off-diagonal norm {off:.3e}")

    eigenvalues = np.diag(A).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return JacobiResult(
        eigenvalues=eigenvalues[order],
        eigenvectors=V[:, order],
        sweeps=sweeps,
        off_norm=off,
        converged=done(off),
    )

"""
Monotonicity quadratic form and estimation of its best constant.

Q_p(phi) = 2 <phi, L phi>_p + sum_i ||A_i phi||_p^2. On span_N the form has
a symmetric matrix S, and the best constant over span_N is the largest
eigenvalue of W_p^{-1/2} S W_p^{-1/2} with W_p the diagonal weight matrix.
"""
import logging
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sparse

from src.monotonicity.jacobi import jacobi_eigh
from src.monotonicity.models import (
    BoundednessEstimate,
    HypothesisCheck,
    InequalityCheck,
    MonotonicityEstimate,
)
from src.simulation.rng import split
from src.spectral.basis import enumerate_indices
from src.spectral.models import ModelSpec
from src.spectral.operators import assemble_A, assemble_L
from src.spectral.space import GradedVector, inner_product, sobolev_weights
from src.utils.errors import ConfigError, SolverError
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)

RATIO_RTOL = 1e-10


def quadratic_form(spec: ModelSpec, phi: GradedVector, p: float) -> float:
    """
    Evaluate Q_p(phi) by applying the assembled operators.

    The operators emit into span_{N+2}, so there is no truncation error:
    <phi, L phi>_p only sees modes <= N and ||A_i phi||_p uses modes <= N+1.
    """
    if phi.d != spec.d:
        raise ConfigError(f"Vector dimension {phi.d} does not match model dimension {spec.d}")
    L = assemble_L(spec, phi.N)
    terms = [2.0 * inner_product(phi, L.apply(phi), p)]
    for A_i in assemble_A(spec, phi.N):
        image = A_i.apply(phi)
        terms.append(inner_product(image, image, p))
    return math.fsum(terms)


def _gram(op_matrix: sparse.spmatrix, weights: np.ndarray) -> np.ndarray:
    """Dense op^T diag(weights) op."""
    return (op_matrix.T @ sparse.diags(weights) @ op_matrix).toarray()


def _assemble_form(spec: ModelSpec, p: float, N: int) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Symmetric form matrix S on span_N, the weights w_p, and the size of the
    normalized parts before cancellation (for absolute tolerances).
    """
    index_set = enumerate_indices(spec.d, N)
    size = index_set.size
    w = sobolev_weights(index_set, p)
    w_up = sobolev_weights(enumerate_indices(spec.d, N + 1), p)

    L_block = assemble_L(spec, N).matrix.tocsr()[:size, :].toarray()
    WL = w[:, None] * L_block
    S_L = WL + WL.T

    G = np.zeros((size, size))
    for A_i in assemble_A(spec, N):
        G += _gram(A_i.matrix, w_up)

    S = S_L + G
    S = 0.5 * (S + S.T)

    r = 1.0 / np.sqrt(w)
    outer = np.outer(r, r)
    scale = float(np.linalg.norm(S_L * outer) + np.linalg.norm(G * outer))
    return S, w, scale


def form_matrix(spec: ModelSpec, p: float, N: int) -> np.ndarray:
    """Symmetric matrix S with Q_p(phi) = c^T S c for phi = sum_k c_k h_k in span_N."""
    return _assemble_form(spec, p, N)[0]


def _largest_eigenpair(B: np.ndarray, scale: float, method: Optional[str]):
    settings = get_settings()
    n = B.shape[0]
    if method is None:
        method = settings.eigensolver
        if method == "jacobi" and n > settings.jacobi_max_dim:
            logger.info(f"Dimension {n} above HERMSPDE_JACOBI_MAX_DIM, using LAPACK")
            method = "lapack"

    if method == "jacobi":
        result = jacobi_eigh(B, atol=1e-13 * scale)
        value = float(result.eigenvalues[-1])
        vector = result.eigenvectors[:, -1]
        sweeps = result.sweeps
        converged = result.converged
    elif method == "lapack":
        try:
            values, vectors = scipy.linalg.eigh(B, subset_by_index=[n - 1, n - 1])
        except (scipy.linalg.LinAlgError, ValueError) as e:
            raise SolverError(f"LAPACK eigh failed: {e}") from e
        value = float(values[-1])
        vector = vectors[:, -1]
        sweeps = 0
        converged = True
    else:
        raise ConfigError(f"Unknown eigensolver '{method}' (expected jacobi or lapack)")

    residual = float(np.linalg.norm(B @ vector - value * vector))
    if not converged:
        raise SolverError(
            f"Jacobi eigensolver did not converge for dimension {n} (residual {residual:.3e})",
            residual=residual,
        )
    return value, vector, residual, sweeps, method


def estimate_constant(
    spec: ModelSpec,
    p: float,
    N: int,
    method: Optional[str] = None,
) -> MonotonicityEstimate:
    """
    Best monotonicity constant over span_N.

    Args:
        spec: Model coefficients
        p: Sobolev index of the inequality
        N: Truncation order (span_N = span{h_k : |k| <= N})
        method: "jacobi" or "lapack"; defaults to HERMSPDE_EIGENSOLVER

    Returns:
        MonotonicityEstimate with the maximizing vector

    Raises:
        SolverError: if the eigensolver fails to converge
    """
    if N < 0:
        raise ConfigError(f"Truncation order must be >= 0, got N={N}")
    S, w, scale = _assemble_form(spec, p, N)
    r = 1.0 / np.sqrt(w)
    B = S * np.outer(r, r)

    value, vector, residual, sweeps, used = _largest_eigenpair(B, scale, method)
    extremal = GradedVector(enumerate_indices(spec.d, N), vector * r)
    logger.info(f"C_hat(p={p:g}, N={N}) = {value:.12g} [{used}, residual {residual:.2e}]")
    return MonotonicityEstimate(
        N=N, p=p, C_hat=value, extremal=extremal, residual=residual, sweeps=sweeps, method=used
    )


def verify_inequality(
    spec: ModelSpec,
    p: float,
    N: int,
    trials: int,
    seed: int,
    estimate: Optional[MonotonicityEstimate] = None,
) -> InequalityCheck:
    """
    Sample random phi in span_N and check Q_p(phi) <= C_hat ||phi||_p^2.

    Args:
        spec: Model coefficients
        p: Sobolev index
        N: Truncation order
        trials: Number of Gaussian coefficient vectors (>= 1)
        seed: Stream seed
        estimate: Reuse an existing estimate at the same (p, N)

    Returns:
        InequalityCheck; passed iff every ratio is within
        C_hat + 1e-10 max(|C_hat|, 1)
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    if estimate is None:
        estimate = estimate_constant(spec, p, N)
    S, w, _ = _assemble_form(spec, p, N)

    phi = split(seed, 0).standard_normal((w.shape[0], trials))
    values = np.sum(phi * (S @ phi), axis=0)
    norms = np.sum(w[:, None] * phi * phi, axis=0)
    ratios = values / norms

    max_ratio = float(np.max(ratios))
    limit = estimate.C_hat + RATIO_RTOL * max(abs(estimate.C_hat), 1.0)
    return InequalityCheck(
        N=N, p=p, trials=trials, max_ratio=max_ratio, C_hat=estimate.C_hat,
        passed=bool(np.all(ratios <= limit)),
    )


def estimate_boundedness(spec: ModelSpec, p: float, N: int) -> BoundednessEstimate:
    """
    Lower bounds on the constants of ||A phi||_{HS(p-2)}^2 <= C1 ||phi||_p^2
    and ||L phi||_{p-2} <= C2 ||phi||_p over span_N.
    """
    index_set = enumerate_indices(spec.d, N)
    w = sobolev_weights(index_set, p)
    r = 1.0 / np.sqrt(w)
    outer = np.outer(r, r)

    G_A = np.zeros((index_set.size, index_set.size))
    w_A = sobolev_weights(enumerate_indices(spec.d, N + 1), p - 2.0)
    for A_i in assemble_A(spec, N):
        G_A += _gram(A_i.matrix, w_A)
    G_L = _gram(assemble_L(spec, N).matrix, sobolev_weights(enumerate_indices(spec.d, N + 2), p - 2.0))

    constants = []
    for G in (G_A, G_L):
        B = 0.5 * (G + G.T) * outer
        value, _, _, _, _ = _largest_eigenpair(B, float(np.linalg.norm(B)), None)
        constants.append(max(value, 0.0))
    return BoundednessEstimate(N=N, p=p, C1_hat=constants[0], C2_hat=math.sqrt(constants[1]))


def constant_table(
    spec: ModelSpec,
    indices: Iterable[float],
    N_list: Iterable[int],
) -> List[MonotonicityEstimate]:
    """Estimates over every (index, N) pair, index-major."""
    N_list = list(N_list)
    return [estimate_constant(spec, s, N) for s in indices for N in N_list]


def hypothesis_check(spec: ModelSpec, N: int, q: Optional[float] = None) -> HypothesisCheck:
    """
    Constants at p and p-2 (and q-2 when q is given) plus the stability test 2 alpha > C0.
    """
    C_p = estimate_constant(spec, spec.p, N).C_hat
    C0 = estimate_constant(spec, spec.p - 2.0, N).C_hat
    C_q2 = shifted = None
    if q is not None:
        C_q2 = estimate_constant(spec, q - 2.0, N).C_hat
        shifted = C_q2 - 2.0 * spec.alpha
    stable = 2.0 * spec.alpha > C0
    if not stable:
        logger.warning(f"2*alpha = {2.0 * spec.alpha:g} does not exceed C0 = {C0:.6g}")
    return HypothesisCheck(
        N=N, p=spec.p, q=q, alpha=spec.alpha, C_p=C_p, C0=C0,
        C_q_minus_2=C_q2, shifted_C_q_minus_2=shifted, stable=stable,
    )

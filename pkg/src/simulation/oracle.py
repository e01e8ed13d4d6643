"""
Exact solution for constant coefficients and the strong-error sweep against it.

With M = 0 the strong solution is X_t = e^{-alpha t} tau_{Z_t} x0, where
tau_z phi = phi(. - z) and Z_t = sigma B_t - b0 t. Translation acts on
Hermite coefficients through the matrix T_kn(z) = int h_n(u) h_k(u + z) du,
a tensor product of 1-d matrices evaluated by Gauss-Hermite quadrature.
"""
import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field
from scipy.special import roots_hermite

from src.simulation.integrator import GalerkinSystem
from src.simulation.models import SimConfig
from src.simulation.rng import BrownianIncrements
from src.spectral.basis import enumerate_indices, hermite_table
from src.spectral.models import ModelSpec
from src.spectral.space import GradedVector, extend, norm
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)

ORACLE_MARGIN = 32


def translation_matrix_1d(z: float, n_out: int, n_in: int) -> np.ndarray:
    """
    T[k, n] = <tau_z h_n, h_k> for k <= n_out, n <= n_in.

    With v = u + z/2 the integrand is a polynomial of degree n + k times
    e^{-v^2}, so (n_out + n_in) // 2 + 2 nodes integrate it exactly.
    """
    nodes, weights = roots_hermite((n_out + n_in) // 2 + 2)
    half = 0.5 * z
    with np.errstate(divide="ignore"):
        factor = np.exp(np.log(weights) + nodes * nodes)
    H_out = hermite_table(n_out, nodes + half)
    H_in = hermite_table(n_in, nodes - half)
    return (H_out * factor[None, :]) @ H_in.T


def default_oracle_order(N: int, z: np.ndarray) -> int:
    """Truncation large enough for the translated tail: N + ceil(max z_i^2) + ORACLE_MARGIN."""
    return N + int(math.ceil(float(np.max(np.asarray(z) ** 2)))) + ORACLE_MARGIN


def translate(x: GradedVector, z: Sequence[float], n_out: int) -> GradedVector:
    """Coefficients of tau_z x on span_{n_out}."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape != (x.d,):
        raise ConfigError(f"Shift must have length d={x.d}, got shape {z.shape}")
    if n_out < x.N:
        raise ConfigError(f"Oracle truncation {n_out} is below the input truncation {x.N}")
    out = enumerate_indices(x.d, n_out)
    K_in = x.index_set.indices
    K_out = out.indices
    matrix = np.ones((out.size, x.index_set.size))
    for i in range(x.d):
        T_i = translation_matrix_1d(float(z[i]), n_out, x.N)
        matrix *= T_i[K_out[:, i][:, None], K_in[:, i][None, :]]
    return GradedVector(out, matrix @ x.coeffs)


def exact_translation_solution(
    spec: ModelSpec,
    x0: GradedVector,
    t: float,
    brownian: Sequence[float],
    n_oracle: Optional[int] = None,
) -> GradedVector:
    """
    Strong solution e^{-alpha t} tau_{Z_t} x0 at time t.

    Args:
        spec: Model with M = 0
        x0: Initial condition
        t: Time
        brownian: B_t (d-vector); Z_t = sigma B_t - b0 t is formed here
        n_oracle: Output truncation (>= x0.N); chosen from |Z_t| when omitted

    Raises:
        ConfigError: if M != 0 or the sizes do not match
    """
    if not spec.has_constant_drift:
        raise ConfigError("The translation oracle needs a constant drift (M = 0)")
    B = np.atleast_1d(np.asarray(brownian, dtype=float))
    if B.shape != (spec.d,):
        raise ConfigError(f"Brownian value must have length d={spec.d}, got shape {B.shape}")
    z = spec.sigma_array @ B - spec.b0_array * t
    if n_oracle is None:
        n_oracle = default_oracle_order(x0.N, z)
    shifted = translate(x0, z, n_oracle)
    return math.exp(-spec.alpha * t) * shifted


class OracleComparison(BaseModel):
    """Strong error of the Galerkin scheme against the exact solution, per time step."""
    N: int
    n_oracle: int
    paths: int
    theta: float
    dts: List[float] = Field(..., description="Step sizes, descending")
    errors: List[float] = Field(..., description="Mean over paths of max_t ||X^G_t - X^O_t||_0")
    stderrs: List[float]
    order: float = Field(..., description="Least-squares slope of log error against log dt")

    def rows(self) -> List[list]:
        return [[dt, e, s] for dt, e, s in zip(self.dts, self.errors, self.stderrs)]


def strong_error_sweep(
    spec: ModelSpec,
    cfg: SimConfig,
    x0: GradedVector,
    dts: Sequence[float],
    n_oracle: Optional[int] = None,
) -> OracleComparison:
    """
    Integrate matched-noise paths at nested step sizes and compare with the oracle.

    Fine increments are drawn at the smallest dt and summed into blocks for
    the coarser ones, so every step size sees the same Brownian path. Errors
    are measured on the grid of the coarsest step.

    Args:
        spec: Model with M = 0
        cfg: Supplies N, T, paths, theta and seed (cfg.dt is ignored)
        x0: Initial condition with x0.N <= cfg.N
        dts: Step sizes, each an integer multiple of the smallest and dividing T
        n_oracle: Oracle truncation (default cfg.N + 32)

    Returns:
        OracleComparison with the fitted empirical order
    """
    if not spec.has_constant_drift:
        raise ConfigError("The strong-error sweep needs a constant drift (M = 0)")
    if len(dts) < 2:
        raise ConfigError("At least two step sizes are needed to fit an order")
    dts = sorted((float(dt) for dt in dts), reverse=True)
    dt_min, dt_max = dts[-1], dts[0]
    ratios = [int(round(dt / dt_min)) for dt in dts]
    for dt, r in zip(dts, ratios):
        if r < 1 or abs(r * dt_min - dt) > 1e-9 * dt or ratios[0] % r != 0:
            raise ConfigError(f"Step {dt} does not nest between {dt_min} and {dt_max}")
    n_fine = SimConfig(N=cfg.N, dt=dt_min, T=cfg.T, paths=cfg.paths).n_steps
    n_coarse = SimConfig(N=cfg.N, dt=dt_max, T=cfg.T, paths=cfg.paths).n_steps
    if n_fine % ratios[0] != 0:
        raise ConfigError(f"T={cfg.T} is not a multiple of dt={dt_max}")
    if x0.N > cfg.N:
        raise ConfigError(f"Initial condition has grade {x0.N} above the truncation N={cfg.N}")
    n_oracle = cfg.N + ORACLE_MARGIN if n_oracle is None else n_oracle
    d, m = spec.d, cfg.paths

    fine = np.stack(
        [BrownianIncrements(cfg.seed, j, d, dt_min).take(n_fine) for j in range(m)], axis=2
    )  # (n_fine, d, paths)
    stride = ratios[0]
    brownian = np.cumsum(fine, axis=0)[stride - 1::stride]  # B at the coarse grid, (n_coarse, d, paths)

    oracle = np.empty((n_coarse, m, enumerate_indices(d, n_oracle).size))
    for n in range(n_coarse):
        t = (n + 1) * dt_max
        for j in range(m):
            oracle[n, j] = exact_translation_solution(spec, x0, t, brownian[n, :, j], n_oracle).coeffs
    logger.info(f"Oracle evaluated on {n_coarse} times x {m} paths at N_oracle={n_oracle}")

    weights_index = enumerate_indices(d, n_oracle)
    x0_full = extend(x0, cfg.N).coeffs
    errors, stderrs = [], []
    for dt, r in zip(dts, ratios):
        system = GalerkinSystem(spec, cfg.N, dt, cfg.theta)
        increments = fine.reshape(n_fine // r, r, d, m).sum(axis=1)
        per_coarse = stride // r
        X = np.repeat(x0_full[:, None], m, axis=1)
        worst = np.zeros(m)
        for n in range(increments.shape[0]):
            X = system.advance(X, increments[n])
            if (n + 1) % per_coarse == 0:
                target = oracle[(n + 1) // per_coarse - 1]
                for j in range(m):
                    diff = extend(GradedVector(system.index_set, X[:, j]), n_oracle).coeffs - target[j]
                    worst[j] = max(worst[j], norm(GradedVector(weights_index, diff), 0.0))
        errors.append(float(np.mean(worst)))
        stderrs.append(float(np.std(worst, ddof=1) / math.sqrt(m)) if m > 1 else 0.0)
        logger.info(f"dt={dt:g}: strong error {errors[-1]:.4e}")

    order = float(np.polyfit(np.log(dts), np.log(errors), 1)[0])
    return OracleComparison(
        N=cfg.N, n_oracle=n_oracle, paths=m, theta=cfg.theta,
        dts=dts, errors=errors, stderrs=stderrs, order=order,
    )

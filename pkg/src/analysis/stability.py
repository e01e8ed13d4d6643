"""
Exponential mean-square stability check on simulated moments.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from src.analysis.models import StabilityReport
from src.simulation.models import MomentTable
from src.spectral.models import ModelSpec

logger = logging.getLogger(__name__)

NOISE_FLOOR = 10.0
MC_SIGMAS = 3.0


def stability_check(
    moments: MomentTable,
    spec: ModelSpec,
    C0: float,
    tol: float = 0.02,
    fit_window: Optional[Tuple[float, float]] = None,
) -> StabilityReport:
    """
    Compare m(t) = E||X_t||^2 with ||x0||^2 e^{(C0 - 2 alpha) t}.

    Args:
        moments: Ensemble output (norms in index p - 2)
        spec: Model (for alpha)
        C0: Monotonicity constant at index p - 2
        tol: Relative slack of the bound
        fit_window: Optional (t_start, t_end) restricting the decay-rate fit

    Returns:
        StabilityReport. beta_hat is minus the least-squares slope of ln m(t)
        over times where m(t) > 10 stderr; passed is None when 2 alpha <= C0.
        violated flags an excess of more than 3 stderr over the bound, which
        Monte Carlo error does not explain.
    """
    t = moments.times
    m = moments.mean_sq_norm
    se = moments.stderr
    x0_sq = moments.x0_norm ** 2
    bound_rate = 2.0 * spec.alpha - C0
    bound = x0_sq * np.exp(-bound_rate * t) * (1.0 + tol)
    common = dict(
        norm_index=moments.norm_index, alpha=spec.alpha, C0=C0, bound_rate=bound_rate,
        x0_sq_norm=x0_sq, tol=tol, times=t.tolist(), mean_sq_norm=m.tolist(),
        stderr=se.tolist(), bound=bound.tolist(),
    )

    if not np.any(m) and x0_sq == 0.0:
        logger.info("All moments are zero; trivially stable")
        return StabilityReport(**common, passed=True, degenerate=True)

    mask = m > NOISE_FLOOR * se
    if fit_window is not None:
        mask &= (t >= fit_window[0]) & (t <= fit_window[1])
    beta_hat = None
    if np.count_nonzero(mask) >= 2:
        beta_hat = -float(np.polyfit(t[mask], np.log(m[mask]), 1)[0])

    informational = bound_rate <= 0.0
    if informational:
        logger.warning(f"2*alpha - C0 = {bound_rate:.4g} <= 0: stability report is informational")
        passed = None
        violated = False
    else:
        passed = bool(np.all(m <= bound))
        violated = bool(np.any(m > bound + MC_SIGMAS * se))
    return StabilityReport(
        **common, beta_hat=beta_hat, fit_points=int(np.count_nonzero(mask)),
        passed=passed, violated=violated, informational=informational,
    )

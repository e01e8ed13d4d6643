"""
Invariant-measure diagnostics: Chebyshev tail mass, tightness radius and
running time averages of bounded functionals.
"""
import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from src.analysis.functionals import Functional
from src.analysis.models import ErgodicReport, TailEntry, TailReport
from src.simulation.integrator import simulate_ensemble
from src.simulation.models import MomentTable, SimConfig
from src.spectral.models import ModelSpec
from src.spectral.space import GradedVector
from src.utils.errors import ConfigError, InvariantViolation

logger = logging.getLogger(__name__)

CHECKPOINT_FRACTIONS = (0.125, 0.25, 0.5, 1.0)


def _stderr(values: np.ndarray) -> float:
    n = values.shape[0]
    return float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0


def _time_average(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    """(1/T) int values dt per row, trapezoid on the save grid."""
    span = times[-1] - times[0]
    if span <= 0.0:
        return values[:, 0].astype(float)
    return trapezoid(values, times, axis=1) / span


def tail_mass(
    moments: MomentTable,
    R_grid: Sequence[float],
    eps: float = 0.01,
    enforce: bool = True,
) -> TailReport:
    """
    Time-averaged exceedance (1/T) int 1{||X_t|| >= R} dt, averaged over paths.

    Args:
        moments: Ensemble output with per-path norms
        R_grid: Positive thresholds (ascending)
        eps: Tightness level for R_eps
        enforce: Raise when an exceedance is above ||x0||^2 / R^2 + 3 stderr

    Returns:
        TailReport; R_eps is the first grid R with exceedance < eps

    Raises:
        InvariantViolation: if enforce and the Chebyshev bound fails
    """
    R_grid = sorted(float(R) for R in R_grid)
    if not R_grid or R_grid[0] <= 0.0:
        raise ConfigError(f"R_grid must hold positive thresholds, got {R_grid}")
    times = moments.times
    x0_sq = moments.x0_norm ** 2

    entries: List[TailEntry] = []
    R_eps = None
    for R in R_grid:
        per_path = _time_average((moments.norms >= R).astype(float), times)
        exceed = float(np.clip(np.mean(per_path), 0.0, 1.0))
        se = _stderr(per_path)
        bound = x0_sq / (R * R)
        entries.append(TailEntry(
            R=R, time_avg_exceed=exceed, stderr=se, chebyshev_bound=bound,
            within_bound=exceed <= bound + 3.0 * se,
        ))
        if R_eps is None and exceed < eps:
            R_eps = R

    report = TailReport(
        norm_index=moments.norm_index, T=float(times[-1] - times[0]), eps=eps,
        x0_sq_norm=x0_sq, entries=entries, R_eps=R_eps,
    )
    if R_eps is None:
        logger.warning(f"No grid radius reaches exceedance < {eps}")
    if enforce and not report.passed:
        failed = [e.R for e in entries if not e.within_bound]
        raise InvariantViolation(f"Chebyshev tail bound violated at R = {failed}")
    return report


def _running_averages(values: np.ndarray, times: np.ndarray, checkpoints: np.ndarray) -> np.ndarray:
    """Per-path (1/c) int_0^c values dt at each checkpoint c, shape (paths, n_checkpoints)."""
    integral = cumulative_trapezoid(values, times, axis=1, initial=0.0)
    elapsed = checkpoints - times[0]
    at_checkpoints = np.stack([np.interp(checkpoints, times, row) for row in integral])
    return at_checkpoints / elapsed[None, :]


def ergodic_from_moments(
    moments: MomentTable,
    functional: Functional,
    alternate: Optional[MomentTable] = None,
) -> ErgodicReport:
    """
    Ergodic report from ensembles that recorded `functional.name` as an observable.

    Args:
        moments: Run from the first start
        functional: Bounded test functional
        alternate: Run from a second start with the same seed (start-gap test)
    """
    if functional.bound is None:
        raise ConfigError(f"Functional {functional.name} is unbounded; ergodic averages need bounded f")
    times = moments.times
    if times[-1] <= times[0]:
        raise ConfigError("Ergodic averages need a save grid spanning a positive time")
    checkpoints = times[0] + (times[-1] - times[0]) * np.asarray(CHECKPOINT_FRACTIONS)

    averages = _running_averages(moments.observables[functional.name], times, checkpoints)
    gap = gap_se = None
    if alternate is not None:
        other = _running_averages(alternate.observables[functional.name], alternate.times, checkpoints)
        diff = averages - other
        gap = np.abs(np.mean(diff, axis=0)).tolist()
        gap_se = [_stderr(diff[:, c]) for c in range(len(checkpoints))]

    return ErgodicReport(
        functional_id=functional.name,
        norm_index=getattr(functional, "s", None),
        bound=functional.bound,
        checkpoints=checkpoints.tolist(),
        running_avg=np.mean(averages, axis=0).tolist(),
        stderr=[_stderr(averages[:, c]) for c in range(len(checkpoints))],
        limit_ref=functional.zero_value,
        start_gap=gap,
        start_gap_stderr=gap_se,
    )


def ergodic_average(
    spec: ModelSpec,
    cfg: SimConfig,
    x0: GradedVector,
    functional: Functional,
    alternate: Optional[GradedVector] = None,
) -> ErgodicReport:
    """
    Simulate from x0 (and from `alternate` with the same seed) and average f(X_t) in time.

    Raises:
        ConfigError: if the functional is unbounded
    """
    if functional.bound is None:
        raise ConfigError(f"Functional {functional.name} is unbounded; ergodic averages need bounded f")
    observables = {functional.name: functional}
    first = simulate_ensemble(spec, cfg, x0, observables=observables)
    second = simulate_ensemble(spec, cfg, alternate, observables=observables) if alternate is not None else None
    return ergodic_from_moments(first, functional, second)

"""
Pydantic models for analysis configuration and reports.
"""
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

LIMIT_NOTE = (
    "limit_ref = f(0) is derived: zero is a fixed point of the linear SPDE and the "
    "invariant measure is unique, so it is the point mass at 0"
)


class FunctionalConfig(BaseModel):
    """Test functional f for ergodic averages."""
    kind: Literal["exp_neg_sq_norm", "cos_coeff", "capped_norm", "sq_norm"] = Field(
        ..., description="Functional family"
    )
    s: Optional[float] = Field(default=None, description="Norm index (defaults to q - 2)")
    k: Optional[List[int]] = Field(default=None, description="Multi-index for cos_coeff")
    cap: float = Field(default=1.0, description="Cap for capped_norm", gt=0.0)

    @model_validator(mode="after")
    def _check_index(self) -> "FunctionalConfig":
        if self.kind == "cos_coeff":
            if not self.k or any(v < 0 for v in self.k):
                raise ValueError("cos_coeff needs a non-negative multi-index k")
        return self


class StabilityReport(BaseModel):
    """Mean-square decay of ||X_t||_{p-2} against the bound ||x0||^2 e^{(C0 - 2 alpha) t}."""
    norm_index: float
    alpha: float
    C0: float
    bound_rate: float = Field(..., description="2 alpha - C0")
    beta_hat: Optional[float] = Field(default=None, description="Fitted decay rate of m(t)")
    fit_points: int = Field(default=0, description="Save times used in the fit")
    x0_sq_norm: float
    tol: float
    times: List[float]
    mean_sq_norm: List[float]
    stderr: List[float]
    bound: List[float] = Field(..., description="||x0||^2 e^{-bound_rate t} (1 + tol)")
    passed: Optional[bool] = Field(default=None, description="None when 2 alpha <= C0")
    violated: bool = Field(default=False, description="Excess over the bound beyond 3 stderr")
    informational: bool = Field(default=False, description="Hypothesis 2 alpha > C0 fails")
    degenerate: bool = Field(default=False, description="All moments zero (x0 = 0)")

    def curve_rows(self) -> List[list]:
        return [[t, m, s] for t, m, s in zip(self.times, self.mean_sq_norm, self.stderr)]


class TailEntry(BaseModel):
    """Time-averaged exceedance of one threshold."""
    R: float = Field(..., gt=0.0)
    time_avg_exceed: float = Field(..., ge=0.0, le=1.0)
    stderr: float
    chebyshev_bound: float = Field(..., description="||x0||^2 / R^2")
    within_bound: bool = Field(..., description="exceedance <= bound + 3 stderr")


class TailReport(BaseModel):
    """Chebyshev tail-mass diagnostic and tightness radius."""
    norm_index: float
    T: float
    eps: float
    x0_sq_norm: float
    entries: List[TailEntry]
    R_eps: Optional[float] = Field(default=None, description="Smallest grid R with exceedance < eps")

    @property
    def passed(self) -> bool:
        return all(e.within_bound for e in self.entries)

    def rows(self) -> List[list]:
        return [[e.R, e.time_avg_exceed, e.stderr, e.chebyshev_bound] for e in self.entries]


class ErgodicReport(BaseModel):
    """Running time averages of a bounded functional, and the gap between two starts."""
    functional_id: str
    norm_index: Optional[float] = None
    bound: float
    checkpoints: List[float]
    running_avg: List[float]
    stderr: List[float]
    limit_ref: float = Field(..., description="f(0)")
    limit_ref_derived: bool = True
    note: str = LIMIT_NOTE
    start_gap: Optional[List[float]] = Field(default=None, description="|A_T(x1) - A_T(x2)|")
    start_gap_stderr: Optional[List[float]] = None

    def rows(self) -> List[list]:
        gap = self.start_gap or [float("nan")] * len(self.checkpoints)
        return [
            [t, a, s, g] for t, a, s, g in zip(self.checkpoints, self.running_avg, self.stderr, gap)
        ]

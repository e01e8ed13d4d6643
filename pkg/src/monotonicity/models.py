"""
Result types for monotonicity and boundedness constant estimation.
"""
from dataclasses import dataclass
from typing import Optional

from pydantic import BaseModel, Field

from src.spectral.space import GradedVector


@dataclass(frozen=True, eq=False)
class MonotonicityEstimate:
    """
    Largest Rayleigh quotient of Q_p over span_N.

    C_hat is a lower bound on the best constant of the monotonicity
    inequality (the supremum over all of S), non-decreasing in N.
    """
    N: int
    p: float
    C_hat: float
    extremal: GradedVector
    residual: float
    sweeps: int = 0
    method: str = "jacobi"


class InequalityCheck(BaseModel):
    """Random-vector verification of Q_p(phi) <= C_hat ||phi||_p^2."""
    N: int
    p: float
    trials: int
    max_ratio: float = Field(..., description="Largest sampled Q_p(phi) / ||phi||_p^2")
    C_hat: float
    passed: bool


class BoundednessEstimate(BaseModel):
    """Lower bounds for the loss-of-two-derivatives constants on span_N."""
    N: int
    p: float
    C1_hat: float = Field(..., description="sup sum_i ||A_i phi||_{p-2}^2 / ||phi||_p^2")
    C2_hat: float = Field(..., description="sup ||L phi||_{p-2} / ||phi||_p")


class HypothesisCheck(BaseModel):
    """Constants at the indices the stability and invariant-measure results use."""
    N: int
    p: float
    q: Optional[float] = None
    alpha: float
    C_p: float = Field(..., description="C_hat at index p")
    C0: float = Field(..., description="C_hat at index p-2")
    C_q_minus_2: Optional[float] = Field(default=None, description="C_hat at index q-2")
    shifted_C_q_minus_2: Optional[float] = Field(
        default=None, description="Constant of the pair (L - alpha, A) at q-2"
    )
    stable: bool = Field(..., description="2 alpha > C0")

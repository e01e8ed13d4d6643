"""
Pydantic model for the SPDE coefficients.
"""
import math
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ModelSpec(BaseModel):
    """
    Coefficients of dX = (L - alpha) X dt + A(X) dB with constant sigma and
    affine drift b(x) = b0 + M x.
    """
    model_config = ConfigDict(frozen=True)

    d: int = Field(..., description="Spatial dimension", ge=1)
    sigma: List[List[float]] = Field(..., description="Constant d x d diffusion matrix")
    b0: List[float] = Field(..., description="Constant part of the drift")
    M: Optional[List[List[float]]] = Field(default=None, description="Linear part of the drift (d x d)")
    alpha: float = Field(default=0.0, description="Damping")
    p: float = Field(default=0.0, description="Regularity index of the solution space S_p")

    @model_validator(mode="before")
    @classmethod
    def _default_linear_drift(cls, data):
        if isinstance(data, dict) and data.get("M") is None and "d" in data:
            data = dict(data)
            data["M"] = [[0.0] * int(data["d"]) for _ in range(int(data["d"]))]
        return data

    @model_validator(mode="after")
    def _check_shapes(self) -> "ModelSpec":
        d = self.d
        if len(self.sigma) != d or any(len(row) != d for row in self.sigma):
            raise ValueError(f"sigma must be {d}x{d}")
        if len(self.b0) != d:
            raise ValueError(f"b0 must have length {d}")
        if len(self.M) != d or any(len(row) != d for row in self.M):
            raise ValueError(f"M must be {d}x{d}")
        values = [v for row in self.sigma for v in row] + list(self.b0)
        values += [v for row in self.M for v in row] + [self.alpha, self.p]
        if not all(math.isfinite(v) for v in values):
            raise ValueError("All model coefficients must be finite")
        return self

    @property
    def sigma_array(self) -> np.ndarray:
        return np.asarray(self.sigma, dtype=float)

    @property
    def b0_array(self) -> np.ndarray:
        return np.asarray(self.b0, dtype=float)

    @property
    def M_array(self) -> np.ndarray:
        return np.asarray(self.M, dtype=float)

    @property
    def has_constant_drift(self) -> bool:
        """Case (1) of the proved monotonicity results: M = 0."""
        return not np.any(self.M_array)

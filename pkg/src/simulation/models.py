"""
Simulation configuration, path snapshots and ensemble moment tables.
"""
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.spectral.space import GradedVector
from src.utils.errors import ConfigError

LATTICE_RTOL = 1e-9


class SimConfig(BaseModel):
    """Galerkin truncation and time-stepping parameters of one ensemble run."""
    N: int = Field(..., description="Truncation order of the Galerkin system", ge=0)
    dt: float = Field(..., description="Time step", gt=0.0)
    T: float = Field(..., description="Horizon")
    paths: int = Field(..., description="Ensemble size", ge=1)
    theta: float = Field(default=0.5, description="Drift implicitness", ge=0.0, le=1.0)
    seed: int = Field(default=0, description="Stream seed", ge=0, lt=2**64)
    save_times: Optional[List[float]] = Field(
        default=None, description="Output grid (defaults to every step, t = 0 included)"
    )
    dump_states: bool = Field(default=False, description="Keep per-path snapshots on the save grid")

    @model_validator(mode="after")
    def _check_horizon(self) -> "SimConfig":
        if not math.isfinite(self.T) or self.T < self.dt:
            raise ValueError(f"Horizon T={self.T} must be finite and >= dt={self.dt}")
        if self.save_times is not None:
            if not self.save_times:
                raise ValueError("save_times must not be empty")
            outside = [t for t in self.save_times if t < 0.0 or t > self.T * (1.0 + LATTICE_RTOL)]
            if outside:
                raise ValueError(f"save_times outside [0, T={self.T}]: {outside}")
        return self

    @property
    def n_steps(self) -> int:
        """Number of steps; T must be a whole number of steps."""
        n = int(round(self.T / self.dt))
        if n < 1 or abs(n * self.dt - self.T) > LATTICE_RTOL * self.T:
            raise ConfigError(f"T={self.T} is not a multiple of dt={self.dt}")
        return n

    def save_steps(self) -> np.ndarray:
        """
        Sorted, unique step indices of the save grid.

        Raises:
            ConfigError: if a save time is off the step lattice
        """
        n_steps = self.n_steps
        if self.save_times is None:
            return np.arange(n_steps + 1)
        steps = []
        for t in self.save_times:
            n = int(round(t / self.dt))
            if abs(n * self.dt - t) > LATTICE_RTOL * max(self.T, 1.0):
                raise ConfigError(f"Save time {t} is not on the step lattice of dt={self.dt}")
            steps.append(min(n, n_steps))
        return np.unique(np.asarray(steps, dtype=int))

    def save_grid(self) -> np.ndarray:
        return self.save_steps() * self.dt


@dataclass(frozen=True, eq=False)
class PathState:
    """Galerkin state of one path at time t."""
    t: float
    x: GradedVector
    path: int = 0

    def to_json(self) -> str:
        return json.dumps({
            "path": self.path,
            "t": self.t,
            "d": self.x.d,
            "N": self.x.N,
            "coeffs": [float(c) for c in self.x.coeffs],
        })


@dataclass
class MomentTable:
    """
    Per-path norms ||X_t||_s on the save grid and their ensemble moments.

    Attributes:
        times: Save grid, shape (n_save,)
        norms: Per-path norms, shape (paths, n_save), rows in path order
        norm_index: Sobolev index s of the norms
        x0_norm: ||x0||_s
        observables: Per-path observable values keyed by name, each (paths, n_save)
        states: Snapshots when dump_states is on
    """
    times: np.ndarray
    norms: np.ndarray
    norm_index: float
    x0_norm: float
    observables: Dict[str, np.ndarray] = field(default_factory=dict)
    states: Optional[List[PathState]] = None

    @property
    def paths(self) -> int:
        return self.norms.shape[0]

    @property
    def mean_sq_norm(self) -> np.ndarray:
        return np.mean(self.norms ** 2, axis=0)

    @property
    def stderr(self) -> np.ndarray:
        if self.paths < 2:
            return np.zeros(self.times.shape[0])
        return np.std(self.norms ** 2, axis=0, ddof=1) / math.sqrt(self.paths)

    @property
    def min_norm(self) -> np.ndarray:
        return np.min(self.norms, axis=0)

    @property
    def max_norm(self) -> np.ndarray:
        return np.max(self.norms, axis=0)

    def rows(self) -> List[list]:
        """CSV rows: t, mean_sq_norm, stderr, min_norm, max_norm."""
        columns = (self.times, self.mean_sq_norm, self.stderr, self.min_norm, self.max_norm)
        return [[float(v) for v in row] for row in zip(*columns)]

"""
Pydantic models for experiment configuration files.
"""
import json
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from src.analysis.models import FunctionalConfig
from src.simulation.models import SimConfig
from src.spectral.basis import enumerate_indices
from src.spectral.models import ModelSpec
from src.spectral.space import GradedVector
from src.utils.errors import ConfigError


class InitialTerm(BaseModel):
    """One term c h_k of an initial condition."""
    k: List[int] = Field(..., description="Multi-index")
    c: float = Field(..., description="Coefficient")

    @model_validator(mode="after")
    def _check_index(self) -> "InitialTerm":
        if any(v < 0 for v in self.k):
            raise ValueError(f"Multi-index {self.k} has a negative entry")
        return self


class InitialCondition(BaseModel):
    """Finite Hermite expansion sum c h_k."""
    terms: List[InitialTerm] = Field(default_factory=list)

    @classmethod
    def unit(cls, d: int) -> "InitialCondition":
        return cls(terms=[InitialTerm(k=[0] * d, c=1.0)])

    def to_vector(self, d: int, N: int) -> GradedVector:
        """
        Coefficient vector on span_N.

        Raises:
            ConfigError: on a dimension mismatch or a term above grade N
        """
        index_set = enumerate_indices(d, N)
        coeffs = np.zeros(index_set.size)
        for term in self.terms:
            if len(term.k) != d:
                raise ConfigError(f"Initial term {term.k} does not have d={d} entries")
            if sum(term.k) > N:
                raise ConfigError(f"Initial term {term.k} lies above the truncation N={N}")
            coeffs[index_set.rank(term.k)] += term.c
        return GradedVector(index_set, coeffs)


class AnalysisConfig(BaseModel):
    """Diagnostics parameters."""
    R_grid: List[float] = Field(default=[1.0, 2.0, 5.0, 10.0, 20.0, 50.0], description="Tail thresholds")
    eps: float = Field(default=0.01, description="Tightness level", gt=0.0, lt=1.0)
    functionals: List[FunctionalConfig] = Field(
        default_factory=lambda: [FunctionalConfig(kind="exp_neg_sq_norm")]
    )
    fit_window: Optional[Tuple[float, float]] = Field(default=None, description="Decay-rate fit window")
    stability_tol: float = Field(default=0.02, description="Relative slack of the stability bound", ge=0.0)
    N_list: List[int] = Field(default=[4, 8, 16], description="Truncations for the constants table")
    inequality_trials: int = Field(default=100, description="Random vectors per inequality check", ge=1)
    embedding_n: List[int] = Field(default=[0, 1, 2, 4, 8], description="Projection orders")
    embedding_pairs: Optional[List[Tuple[float, float]]] = Field(
        default=None, description="(p, q) pairs for the embedding sweep (default [(p, q)])"
    )
    oracle_dts: List[float] = Field(default=[1e-2, 1e-3, 1e-4], description="Step sizes of the strong-error sweep")


class ExperimentConfig(BaseModel):
    """One experiment: model, simulation, target index q and diagnostics."""
    name: str = Field(default="experiment")
    model: ModelSpec
    sim: SimConfig
    q: float = Field(..., description="Invariant-measure space index, q < p")
    initial: Optional[InitialCondition] = Field(default=None, description="x0 (default h_0)")
    alternate_initial: Optional[InitialCondition] = Field(
        default=None, description="Second start for the start-gap test (default 2 h_0 + h_{e1})"
    )
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)
    output_dir: str = Field(default="results")

    @model_validator(mode="after")
    def _fill_starts(self) -> "ExperimentConfig":
        d = self.model.d
        if self.initial is None:
            self.initial = InitialCondition.unit(d)
        if self.alternate_initial is None:
            e1 = [1] + [0] * (d - 1)
            self.alternate_initial = InitialCondition(
                terms=[InitialTerm(k=[0] * d, c=2.0), InitialTerm(k=e1, c=1.0)]
            )
        return self

    def x0(self) -> GradedVector:
        return self.initial.to_vector(self.model.d, self.sim.N)

    def x1(self) -> GradedVector:
        return self.alternate_initial.to_vector(self.model.d, self.sim.N)


def load_config(path: str) -> ExperimentConfig:
    """
    Read and validate an experiment file.

    Raises:
        ConfigError: if the file is missing, is not JSON or fails validation
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Malformed JSON in {path}: {e}") from e
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid config {path}: {e}") from e


def apply_overrides(
    config: ExperimentConfig,
    seed: Optional[int] = None,
    paths: Optional[int] = None,
    out: Optional[str] = None,
) -> ExperimentConfig:
    """Command-line overrides, re-validated."""
    data = config.model_dump()
    if seed is not None:
        data["sim"]["seed"] = seed
    if paths is not None:
        data["sim"]["paths"] = paths
    if out is not None:
        data["output_dir"] = str(Path(out))
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid override: {e}") from e

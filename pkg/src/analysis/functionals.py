"""
Test functionals on S_s for ergodic averages.

Each functional evaluates a block of coefficient columns at once so it can
be handed to the ensemble simulator as an observable.
"""
from abc import ABC, abstractmethod
from typing import Optional, Sequence

import numpy as np

from src.analysis.models import FunctionalConfig
from src.spectral.basis import BasisIndexSet
from src.spectral.space import GradedVector, sobolev_weights
from src.utils.errors import ConfigError


class Functional(ABC):
    """f: S_s -> R; `bound` is sup |f| or None for unbounded f."""
    bound: Optional[float] = None
    zero_value: float = 0.0

    @property
    @abstractmethod
    def name(self) -> str:
        ...

    @abstractmethod
    def __call__(self, index_set: BasisIndexSet, X: np.ndarray) -> np.ndarray:
        """Values at the columns of X (shape (size, m))."""

    def evaluate(self, x: GradedVector) -> float:
        return float(self(x.index_set, x.coeffs.reshape(-1, 1))[0])


def _sq_norms(index_set: BasisIndexSet, X: np.ndarray, s: float) -> np.ndarray:
    return np.sum(sobolev_weights(index_set, s)[:, None] * X * X, axis=0)


class ExpNegSqNorm(Functional):
    """exp(-||x||_s^2)."""
    bound = 1.0
    zero_value = 1.0

    def __init__(self, s: float):
        self.s = s

    @property
    def name(self) -> str:
        return f"exp_neg_sq_norm(s={self.s:g})"

    def __call__(self, index_set, X):
        return np.exp(-_sq_norms(index_set, X, self.s))


class CosCoeff(Functional):
    """cos(<x, h_k>)."""
    bound = 1.0
    zero_value = 1.0

    def __init__(self, k: Sequence[int]):
        self.k = tuple(int(v) for v in k)

    @property
    def name(self) -> str:
        return f"cos_coeff(k={list(self.k)})"

    def __call__(self, index_set, X):
        if len(self.k) != index_set.d:
            raise ConfigError(f"Multi-index {list(self.k)} does not match d={index_set.d}")
        if sum(self.k) > index_set.N:
            return np.ones(X.shape[1])
        return np.cos(X[index_set.rank(self.k)])


class CappedNorm(Functional):
    """min(||x||_s, cap)."""

    def __init__(self, s: float, cap: float = 1.0):
        self.s = s
        self.cap = cap
        self.bound = cap

    @property
    def name(self) -> str:
        return f"capped_norm(s={self.s:g}, cap={self.cap:g})"

    def __call__(self, index_set, X):
        return np.minimum(np.sqrt(_sq_norms(index_set, X, self.s)), self.cap)


class SqNorm(Functional):
    """||x||_s^2 (unbounded; moment bookkeeping only)."""

    def __init__(self, s: float):
        self.s = s

    @property
    def name(self) -> str:
        return f"sq_norm(s={self.s:g})"

    def __call__(self, index_set, X):
        return _sq_norms(index_set, X, self.s)


def make_functional(config: FunctionalConfig, default_index: float) -> Functional:
    """Build a functional; the norm index falls back to `default_index` (q - 2)."""
    s = default_index if config.s is None else config.s
    if config.kind == "exp_neg_sq_norm":
        return ExpNegSqNorm(s)
    if config.kind == "cos_coeff":
        return CosCoeff(config.k)
    if config.kind == "capped_norm":
        return CappedNorm(s, config.cap)
    return SqNorm(s)

"""
Graded Hermite coefficient vectors and the Hermite-Sobolev inner products.

Stored coefficients are always L2 pairings <x, h_k>; the regularity index p
only enters through the weights (2|k| + d)^{2p}.
"""
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from pydantic import BaseModel, Field

from src.spectral.basis import BasisIndexSet, enumerate_indices, hermite_table
from src.utils.errors import ConfigError


@dataclass(frozen=True, eq=False)
class GradedVector:
    """Finite Hermite expansion sum_k coeffs[rank(k)] h_k."""
    index_set: BasisIndexSet
    coeffs: np.ndarray

    __array_ufunc__ = None

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.shape != (self.index_set.size,):
            raise ValueError(
                f"Coefficient length {coeffs.shape} does not match basis size {self.index_set.size}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("Coefficients must be finite")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def d(self) -> int:
        return self.index_set.d

    @property
    def N(self) -> int:
        return self.index_set.N

    def __add__(self, other: "GradedVector") -> "GradedVector":
        N = max(self.N, other.N)
        return GradedVector(
            enumerate_indices(self.d, N), extend(self, N).coeffs + extend(other, N).coeffs
        )

    def __sub__(self, other: "GradedVector") -> "GradedVector":
        return self + (-1.0) * other

    def __rmul__(self, scalar: float) -> "GradedVector":
        return GradedVector(self.index_set, float(scalar) * self.coeffs)

    def to_json(self) -> str:
        return json.dumps({"d": self.d, "N": self.N, "coeffs": [float(c) for c in self.coeffs]})

    @classmethod
    def from_json(cls, text: str) -> "GradedVector":
        data = json.loads(text)
        return cls(enumerate_indices(int(data["d"]), int(data["N"])), np.asarray(data["coeffs"]))


def zeros(d: int, N: int) -> GradedVector:
    index_set = enumerate_indices(d, N)
    return GradedVector(index_set, np.zeros(index_set.size))


def unit(k: Sequence[int], N: int) -> GradedVector:
    """The coefficient vector of a single basis function h_k."""
    index_set = enumerate_indices(len(k), N)
    coeffs = np.zeros(index_set.size)
    coeffs[index_set.rank(k)] = 1.0
    return GradedVector(index_set, coeffs)


def grade_weights(d: int, N: int, p: float) -> np.ndarray:
    """(2n + d)^{2p} for n = 0..N."""
    return (2.0 * np.arange(N + 1) + d) ** (2.0 * p)


def sobolev_weights(index_set: BasisIndexSet, p: float) -> np.ndarray:
    """Per-coefficient weights w_k(p) = (2|k| + d)^{2p}, expanded from the grade table."""
    return grade_weights(index_set.d, index_set.N, p)[index_set.grades]


def extend(x: GradedVector, N: int) -> GradedVector:
    """Zero-pad x to truncation N >= x.N."""
    if N < x.N:
        raise ValueError(f"Cannot extend from N={x.N} down to N={N}; use restrict")
    if N == x.N:
        return x
    index_set = enumerate_indices(x.d, N)
    coeffs = np.zeros(index_set.size)
    coeffs[: x.index_set.size] = x.coeffs
    return GradedVector(index_set, coeffs)


def restrict(x: GradedVector, n: int) -> GradedVector:
    """Coefficients of grade <= n, as a vector on the smaller index set."""
    if not 0 <= n <= x.N:
        raise ValueError(f"Restriction order n={n} must lie in [0, {x.N}]")
    return GradedVector(enumerate_indices(x.d, n), x.coeffs[: x.index_set.prefix_size(n)])


def inner_product(f: GradedVector, g: GradedVector, p: float) -> float:
    """
    Hermite-Sobolev inner product <f, g>_p.

    Mixed truncations are zero-padded, so only the common prefix contributes.
    Terms are accumulated in ascending grade with an exactly rounded sum.
    """
    if f.d != g.d:
        raise ValueError(f"Dimension mismatch: d={f.d} vs d={g.d}")
    common = f if f.N <= g.N else g
    m = common.index_set.size
    w = sobolev_weights(common.index_set, p)
    return math.fsum(w * f.coeffs[:m] * g.coeffs[:m])


def norm(f: GradedVector, p: float) -> float:
    return math.sqrt(inner_product(f, f, p))


def project_truncate(x: GradedVector, n: int) -> GradedVector:
    """
    Projection T_n onto span{h_k : |k| <= n}.

    Args:
        x: Vector in span_N
        n: Projection order, 0 <= n <= N

    Returns:
        Vector on the same index set, zero above grade n
    """
    if not 0 <= n <= x.N:
        raise ConfigError(f"Projection order n={n} must lie in [0, N={x.N}]")
    coeffs = np.zeros(x.index_set.size)
    m = x.index_set.prefix_size(n)
    coeffs[:m] = x.coeffs[:m]
    return GradedVector(x.index_set, coeffs)


class EmbeddingCheck(BaseModel):
    """Outcome of one compact-embedding bound evaluation."""
    n: int = Field(..., description="Projection order")
    p: float = Field(..., description="Source index")
    q: float = Field(..., description="Target index, q < p")
    lhs: float = Field(..., description="||T_n x - x||_q")
    rhs: float = Field(..., description="(2n+d)^{-(p-q)} ||x||_p")
    passed: bool = Field(..., description="lhs <= rhs (1 + 1e-12)")


def embedding_bound_check(x: GradedVector, p: float, q: float, n: int) -> EmbeddingCheck:
    """
    Check ||T_n x - x||_q <= (2n + d)^{-(p-q)} ||x||_p.

    Raises:
        ConfigError: if q >= p
    """
    if q >= p:
        raise ConfigError(f"Embedding check needs q < p, got q={q}, p={p}")
    tail = x - project_truncate(x, n)
    lhs = norm(tail, q)
    rhs = (2.0 * n + x.d) ** (-(p - q)) * norm(x, p)
    return EmbeddingCheck(n=n, p=p, q=q, lhs=lhs, rhs=rhs, passed=lhs <= rhs * (1.0 + 1e-12))


def identity_gap(x: GradedVector, p: float, n: int) -> float:
    """||T_n x - x||_p / ||x||_p; reaches 1 for x = h_m with |m| > n, so Id is not compact."""
    total = norm(x, p)
    if total == 0.0:
        return 0.0
    return norm(x - project_truncate(x, n), p) / total


def dirac_coeffs(y: Sequence[float], N: int) -> GradedVector:
    """
    Hermite coefficients of the point mass at y: <delta_y, h_k> = h_k(y).

    The result lies in S_p only for p < -d/4; its truncations converge there.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    index_set = enumerate_indices(y.shape[0], N)
    coeffs = np.ones(index_set.size)
    for i, y_i in enumerate(y):
        coeffs *= hermite_table(N, y_i)[index_set.indices[:, i]]
    return GradedVector(index_set, coeffs)

"""
Multi-index enumeration and evaluation of d-dimensional Hermite functions.

Multi-indices are ordered graded-lexicographically: by |k| first, then
lexicographically ascending within a grade. Every truncation {|k| <= n}
is therefore a prefix of every larger one.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
from scipy.special import comb

from src.utils.errors import ConfigError
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]

_PI_QUARTER = math.pi ** -0.25


def basis_size(d: int, N: int) -> int:
    """Number of multi-indices with |k| <= N, i.e. C(N+d, d)."""
    if N < 0:
        return 0
    return int(comb(N + d, d, exact=True))


def _comb_array(n: np.ndarray, k: int) -> np.ndarray:
    # scipy returns 0 for n < k or n < 0; values stay far below 2**53
    return np.rint(comb(n, k)).astype(np.int64)


def _compositions(total: int, parts: int):
    """Yield all tuples of `parts` non-negative ints summing to `total`, lex ascending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True, eq=False)
class BasisIndexSet:
    """
    Truncated Hermite basis {h_k : |k| <= N} in graded-lex order.

    Attributes:
        d: Dimension
        N: Truncation order
        indices: (size, d) integer array, row r is unrank(r)
        grades: (size,) array of |k|
    """
    d: int
    N: int
    indices: np.ndarray
    grades: np.ndarray

    @property
    def size(self) -> int:
        return self.indices.shape[0]

    def prefix_size(self, n: int) -> int:
        """Number of leading entries with grade <= n."""
        return basis_size(self.d, min(n, self.N))

    def rank(self, k: Sequence[int]) -> int:
        """Position of multi-index k in the ordering."""
        k = tuple(int(v) for v in k)
        if len(k) != self.d or min(k) < 0:
            raise ValueError(f"Invalid multi-index {k} for d={self.d}")
        if sum(k) > self.N:
            raise ValueError(f"Multi-index {k} has order {sum(k)} > N={self.N}")
        return int(self.ranks(np.asarray([k]))[0])

    def ranks(self, K: np.ndarray) -> np.ndarray:
        """
        Vectorized rank by combinatorial counting.

        rank(k) = #{|m| < |k|} + #{|m| = |k|, m <_lex k}; the in-grade count
        telescopes position by position into differences of binomials.

        Args:
            K: (m, d) array of multi-indices with |k| <= N

        Returns:
            (m,) int64 array of ranks
        """
        K = np.asarray(K, dtype=np.int64)
        n = K.sum(axis=1)
        rank = _comb_array(n - 1 + self.d, self.d)
        remaining = n.copy()
        for i in range(self.d):
            m = self.d - 1 - i
            rank += _comb_array(remaining + m, m) - _comb_array(remaining - K[:, i] + m, m)
            remaining -= K[:, i]
        return rank

    def unrank(self, r: int) -> MultiIndex:
        """Inverse of rank, by the same counting (no table lookup)."""
        if not 0 <= r < self.size:
            raise ValueError(f"Rank {r} outside [0, {self.size})")
        n = 0
        while basis_size(self.d, n) <= r:
            n += 1
        r -= basis_size(self.d, n - 1)
        k = []
        remaining = n
        for i in range(self.d - 1):
            m = self.d - 1 - i
            v = 0
            while True:
                # compositions of (remaining - v) into m parts
                block = int(comb(remaining - v + m - 1, m - 1, exact=True))
                if r < block:
                    break
                r -= block
                v += 1
            k.append(v)
            remaining -= v
        k.append(remaining)
        return tuple(k)


def enumerate_indices(d: int, N: int) -> BasisIndexSet:
    """
    Enumerate all multi-indices with |k| <= N in graded-lex order.

    Args:
        d: Dimension (>= 1)
        N: Truncation order (>= 0)

    Returns:
        BasisIndexSet of size C(N+d, d)

    Raises:
        ConfigError: d < 1, N < 0, or size above HERMSPDE_MAX_BASIS_SIZE
    """
    if d < 1:
        raise ConfigError(f"Dimension must be >= 1, got d={d}")
    if N < 0:
        raise ConfigError(f"Truncation order must be >= 0, got N={N}")
    size = basis_size(d, N)
    cap = get_settings().max_basis_size
    if size > cap:
        raise ConfigError(
            f"Basis size C({N}+{d},{d}) = {size} exceeds the configured cap {cap} "
            f"(HERMSPDE_MAX_BASIS_SIZE)"
        )
    return _enumerate_cached(d, N)


@lru_cache(maxsize=64)
def _enumerate_cached(d: int, N: int) -> BasisIndexSet:
    indices = np.empty((basis_size(d, N), d), dtype=np.int64)
    row = 0
    for grade in range(N + 1):
        for k in _compositions(grade, d):
            indices[row] = k
            row += 1
    grades = indices.sum(axis=1)
    indices.setflags(write=False)
    grades.setflags(write=False)
    logger.debug(f"Enumerated {row} multi-indices (d={d}, N={N})")
    return BasisIndexSet(d=d, N=N, indices=indices, grades=grades)


def hermite_table(n_max: int, t) -> np.ndarray:
    """
    Normalized 1-d Hermite functions h_0..h_{n_max} at the points t.

    Uses h_{n+1} = sqrt(2/(n+1)) t h_n - sqrt(n/(n+1)) h_{n-1} with
    h_0 = pi^{-1/4} exp(-t^2/2); never forms 2^n n!.

    Args:
        n_max: Highest order
        t: Scalar or array of evaluation points

    Returns:
        Array of shape (n_max + 1, *shape(t))
    """
    t = np.asarray(t, dtype=float)
    table = np.empty((n_max + 1,) + t.shape)
    table[0] = _PI_QUARTER * np.exp(-0.5 * t * t)
    if n_max >= 1:
        table[1] = math.sqrt(2.0) * t * table[0]
    for n in range(1, n_max):
        table[n + 1] = (
            math.sqrt(2.0 / (n + 1)) * t * table[n]
            - math.sqrt(n / (n + 1)) * table[n - 1]
        )
    return table


def hermite_eval(k: Sequence[int], y: Sequence[float]) -> float:
    """
    Evaluate h_k(y) = prod_i h_{k_i}(y_i).

    Args:
        k: Multi-index
        y: Point in R^d (same length as k)

    Returns:
        h_k(y); underflows to 0 for very large |y|
    """
    k = tuple(int(v) for v in k)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if len(k) != y.shape[0]:
        raise ValueError(f"Multi-index {k} and point of length {y.shape[0]} disagree")
    value = 1.0
    for k_i, y_i in zip(k, y):
        value *= float(hermite_table(k_i, y_i)[k_i])
    return value

"""
Banded matrices of the differential operators in the Hermite basis.

An operator assembled at input truncation N emits into truncation N + shift,
so quadratic forms of inputs in span_N are exact. Galerkin square
truncation is explicit (`square_truncate`).
"""
import logging
from dataclasses import dataclass
from typing import List

import numpy as np
import scipy.sparse as sparse

from src.spectral.basis import basis_size, enumerate_indices
from src.spectral.models import ModelSpec
from src.spectral.space import GradedVector
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BandOperator:
    """
    Linear map span_{n_in} -> span_{n_in + shift}.

    Attributes:
        d: Dimension
        n_in: Input truncation order
        shift: Bound on the grade increase |k'| - |k| of any nonzero entry
        matrix: CSC matrix of shape (size(n_in + shift), size(n_in))
    """
    d: int
    n_in: int
    shift: int
    matrix: sparse.csc_matrix

    __array_ufunc__ = None

    @property
    def n_out(self) -> int:
        return self.n_in + self.shift

    @property
    def shape(self):
        return self.matrix.shape

    def apply(self, v: GradedVector) -> GradedVector:
        if v.d != self.d or v.N != self.n_in:
            raise ConfigError(
                f"Operator expects input truncation N={self.n_in} (d={self.d}), "
                f"got N={v.N} (d={v.d})"
            )
        return GradedVector(enumerate_indices(self.d, self.n_out), self.matrix @ v.coeffs)

    def padded(self, shift: int) -> "BandOperator":
        """Same map, declared with a larger shift (extra zero rows)."""
        if shift < self.shift:
            raise ValueError(f"Cannot shrink shift from {self.shift} to {shift}")
        if shift == self.shift:
            return self
        extra = basis_size(self.d, self.n_in + shift) - self.matrix.shape[0]
        zeros = sparse.csc_matrix((extra, self.matrix.shape[1]))
        return BandOperator(self.d, self.n_in, shift, sparse.vstack([self.matrix, zeros]).tocsc())

    def square_truncate(self) -> sparse.csc_matrix:
        """Galerkin block P_N op P_N on span_{n_in}."""
        size = basis_size(self.d, self.n_in)
        return self.matrix.tocsr()[:size, :].tocsc()

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def __matmul__(self, other: "BandOperator") -> "BandOperator":
        # (self o other): other's output truncation feeds self's input
        if other.n_out != self.n_in:
            raise ConfigError(
                f"Cannot compose: inner operator emits N={other.n_out}, outer expects N={self.n_in}"
            )
        return BandOperator(
            self.d, other.n_in, self.shift + other.shift, (self.matrix @ other.matrix).tocsc()
        )

    def __add__(self, other: "BandOperator") -> "BandOperator":
        if other.n_in != self.n_in or other.d != self.d:
            raise ConfigError("Cannot add operators with different input spaces")
        shift = max(self.shift, other.shift)
        a, b = self.padded(shift), other.padded(shift)
        return BandOperator(self.d, self.n_in, shift, (a.matrix + b.matrix).tocsc())

    def __sub__(self, other: "BandOperator") -> "BandOperator":
        return self + (-1.0) * other

    def __rmul__(self, scalar: float) -> "BandOperator":
        return BandOperator(self.d, self.n_in, self.shift, (float(scalar) * self.matrix).tocsc())

    def __neg__(self) -> "BandOperator":
        return (-1.0) * self


def apply(op: BandOperator, v: GradedVector) -> GradedVector:
    """Exact matrix-vector product; output truncation op.n_in + op.shift."""
    return op.apply(v)


def zero_op(d: int, N: int, shift: int = 0) -> BandOperator:
    shape = (basis_size(d, N + shift), basis_size(d, N))
    return BandOperator(d, N, shift, sparse.csc_matrix(shape))


def identity_op(d: int, N: int) -> BandOperator:
    return BandOperator(d, N, 0, sparse.identity(basis_size(d, N), format="csc"))


def _ladder_op(axis: int, d: int, N: int, raise_sign: float) -> BandOperator:
    """
    sqrt(n_i/2) h_{n-e_i} + raise_sign * sqrt((n_i+1)/2) h_{n+e_i}, column by column.
    """
    if not 0 <= axis < d:
        raise ConfigError(f"Coordinate axis {axis} outside [0, {d})")
    source = enumerate_indices(d, N)
    target = enumerate_indices(d, N + 1)
    K = source.indices
    cols = np.arange(source.size)
    n_i = K[:, axis].astype(float)

    up = K.copy()
    up[:, axis] += 1
    rows_up = target.ranks(up)
    vals_up = raise_sign * np.sqrt((n_i + 1.0) / 2.0)

    has_lower = K[:, axis] > 0
    down = K[has_lower].copy()
    down[:, axis] -= 1
    rows_down = target.ranks(down)
    vals_down = np.sqrt(n_i[has_lower] / 2.0)

    rows = np.concatenate([rows_down, rows_up])
    data = np.concatenate([vals_down, vals_up])
    columns = np.concatenate([cols[has_lower], cols])
    matrix = sparse.coo_matrix((data, (rows, columns)), shape=(target.size, source.size))
    return BandOperator(d, N, 1, matrix.tocsc())


def derivative_op(axis: int, d: int, N: int) -> BandOperator:
    """
    Partial derivative along `axis` (0-based):
    d_i h_n = sqrt(n_i/2) h_{n-e_i} - sqrt((n_i+1)/2) h_{n+e_i}.
    """
    return _ladder_op(axis, d, N, -1.0)


def coordinate_multiply_op(axis: int, d: int, N: int) -> BandOperator:
    """
    Multiplication by x_axis:
    x_i h_n = sqrt(n_i/2) h_{n-e_i} + sqrt((n_i+1)/2) h_{n+e_i}.
    """
    return _ladder_op(axis, d, N, 1.0)


def assemble_A(spec: ModelSpec, N: int) -> List[BandOperator]:
    """
    Noise operators A_i(phi) = -sum_j d_j(sigma_ji phi) = -sum_j sigma_ji d_j phi.

    Args:
        spec: Model coefficients
        N: Input truncation

    Returns:
        d operators of shift 1
    """
    d = spec.d
    sigma = spec.sigma_array
    derivatives = [derivative_op(j, d, N) for j in range(d)]
    operators = []
    for i in range(d):
        op = zero_op(d, N, shift=1)
        for j in range(d):
            if sigma[j, i] != 0.0:
                op = op - float(sigma[j, i]) * derivatives[j]
        operators.append(op)
    return operators


def assemble_L(spec: ModelSpec, N: int) -> BandOperator:
    """
    Drift operator L(phi) = 1/2 sum_ij (sigma sigma^t)_ij d_i d_j phi + sum_i d_i(b_i phi),
    with b_i phi = b0_i phi + sum_j M_ij x_j phi.

    Args:
        spec: Model coefficients
        N: Input truncation

    Returns:
        Operator of shift 2
    """
    d = spec.d
    a = spec.sigma_array @ spec.sigma_array.T
    b0 = spec.b0_array
    M = spec.M_array

    inner = [derivative_op(j, d, N) for j in range(d)]
    outer = [derivative_op(i, d, N + 1) for i in range(d)]

    L = zero_op(d, N, shift=2)
    for i in range(d):
        for j in range(d):
            if a[i, j] != 0.0:
                L = L + float(0.5 * a[i, j]) * (outer[i] @ inner[j])

    for i in range(d):
        if b0[i] == 0.0 and not np.any(M[i]):
            continue
        drift = (float(b0[i]) * identity_op(d, N)).padded(1)
        for j in range(d):
            if M[i, j] != 0.0:
                drift = drift + float(M[i, j]) * coordinate_multiply_op(j, d, N)
        L = L + outer[i] @ drift

    logger.debug(f"Assembled L: d={d}, N={N}, nnz={L.matrix.nnz}")
    return L


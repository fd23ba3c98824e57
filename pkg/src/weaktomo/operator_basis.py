"""Traceless Hermitian operator bases, Bloch-style coordinates, the standard
linear tomography solve, and the flat metric on the space of mixed states.

A state decomposes as rho = I/N + sum_i c_i T_i over N^2 - 1 traceless
Hermitian operators T_i.  Measuring the expectations x_j = tr(rho T_j) gives
the linear system x = M c with Gram matrix M_ij = tr(T_i T_j); inverting it
is standard tomography.

The line element dl^2 = 2 tr(d_rho^2) defines a metric on state space which
is constant (flat) in the independent matrix-entry coordinates; its
determinant d(N)^2 enters every error-volume formula downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidDimension
from .linalg import (
    DensityMatrix,
    ReconstructedState,
    as_matrix,
    build_reconstruction,
    max_abs,
    _freeze,
)

GRAM_NORMALIZATION = 2.0  # tr(T_i T_j) = 2 delta_ij, Pauli-compatible


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    """Ordered set of N^2 - 1 traceless Hermitian operators with its Gram
    matrix M_ij = tr(T_i T_j)."""

    dim: int
    ops: np.ndarray  # (N^2 - 1, N, N) complex
    gram: np.ndarray  # (N^2 - 1, N^2 - 1) real

    def __post_init__(self):
        object.__setattr__(self, "ops", _freeze(self.ops))
        g = np.array(self.gram, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)

    @property
    def size(self) -> int:
        return self.ops.shape[0]


def _gram_of(ops: np.ndarray) -> np.ndarray:
    # tr(T_i T_j) for Hermitian T is real
    return np.real(np.einsum("iab,jba->ij", ops, ops))


def gell_mann_basis(dim: int) -> OperatorBasis:
    """Generalized Gell-Mann basis, normalized so tr(T_i T_j) = 2 delta_ij.

    Ordering: the N(N-1)/2 symmetric pair operators (lexicographic i<j),
    then the N(N-1)/2 antisymmetric ones, then the N-1 diagonal ones.  For
    N=2 this is exactly (sigma_x, sigma_y, sigma_z).
    """
    if dim < 2:
        raise InvalidDimension(f"basis needs dim >= 2, got {dim}")
    ops = []
    for i in range(dim):
        for j in range(i + 1, dim):
            m = np.zeros((dim, dim), dtype=complex)
            m[i, j] = 1
            m[j, i] = 1
            ops.append(m)
    for i in range(dim):
        for j in range(i + 1, dim):
            m = np.zeros((dim, dim), dtype=complex)
            m[i, j] = -1j
            m[j, i] = 1j
            ops.append(m)
    for level in range(1, dim):
        m = np.zeros((dim, dim), dtype=complex)
        m[:level, :level] = np.eye(level)
        m[level, level] = -level
        ops.append(m * np.sqrt(2.0 / (level * (level + 1))))
    arr = np.array(ops)
    return OperatorBasis(dim=dim, ops=arr, gram=_gram_of(arr))


@dataclass(frozen=True, eq=False)
class BlochCoordinates:
    """Expansion coefficients c and expectations x = M c of a state."""

    dim: int
    c: np.ndarray
    x: np.ndarray


def bloch_decompose(rho: DensityMatrix, basis: OperatorBasis) -> BlochCoordinates:
    """Coefficients c_i of rho = I/N + sum c_i T_i, and x_j = tr(rho T_j)."""
    if rho.dim != basis.dim:
        raise DimensionMismatch(f"state dim {rho.dim} vs basis dim {basis.dim}")
    x = np.real(np.einsum("ab,iba->i", rho.matrix, basis.ops))
    c = np.linalg.solve(basis.gram, x)
    return BlochCoordinates(dim=rho.dim, c=c, x=x)


def assemble_state(c: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """I/N + sum c_i T_i  (Hermitian, unit trace by construction)."""
    return np.eye(basis.dim, dtype=complex) / basis.dim + np.einsum(
        "i,iab->ab", np.asarray(c, dtype=float), basis.ops
    )


def standard_reconstruct(
    x, basis: OperatorBasis, noise_scale: float = 0.0
) -> ReconstructedState:
    """Solve x = M c and assemble the state estimate.

    No positivity projection is applied: noisy expectations can produce an
    indefinite estimate, which is returned as-is with its validity flags.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != basis.size:
        raise DimensionMismatch(
            f"expected {basis.size} expectation values, got {x.shape[0]}"
        )
    c = np.linalg.solve(basis.gram, x)
    return build_reconstruction(assemble_state(c, basis), noise_scale=noise_scale)


@dataclass(frozen=True, eq=False)
class FlatMetric:
    """Constant Gram matrix of dl^2 = 2 tr(d_rho^2) on the independent
    matrix-entry coordinates.

    Coordinates: the first N-1 diagonal entries (the last one is eliminated
    through the unit-trace constraint), then Re/Im of each upper off-diagonal
    entry in lexicographic order.  ``det_sqrt`` is d(N) = sqrt(det gram).
    """

    dim: int
    coordinate_labels: tuple[str, ...]
    gram: np.ndarray
    det_sqrt: float

    def __post_init__(self):
        g = np.array(self.gram, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)

    @property
    def size(self) -> int:
        return self.gram.shape[0]

    def coords(self, matrix) -> np.ndarray:
        """Coordinate vector of a Hermitian matrix (or difference of two)."""
        m = as_matrix(matrix)
        n = self.dim
        out = np.empty(n * n - 1)
        out[: n - 1] = np.diag(m).real[: n - 1]
        k = n - 1
        for i in range(n):
            for j in range(i + 1, n):
                out[k] = m[i, j].real
                out[k + 1] = m[i, j].imag
                k += 2
        return out

    def matrix(self, coords, trace: float = 1.0) -> np.ndarray:
        """Hermitian matrix with the given coordinates and total trace."""
        y = np.asarray(coords, dtype=float).reshape(-1)
        n = self.dim
        if y.shape[0] != n * n - 1:
            raise DimensionMismatch(f"expected {n * n - 1} coordinates, got {y.shape[0]}")
        m = np.zeros((n, n), dtype=complex)
        for i in range(n - 1):
            m[i, i] = y[i]
        m[n - 1, n - 1] = trace - y[: n - 1].sum()
        k = n - 1
        for i in range(n):
            for j in range(i + 1, n):
                m[i, j] = y[k] + 1j * y[k + 1]
                m[j, i] = y[k] - 1j * y[k + 1]
                k += 2
        return m

    def quadratic_form(self, displacement) -> float:
        """dl^2 for a coordinate displacement vector."""
        dy = np.asarray(displacement, dtype=float).reshape(-1)
        return float(dy @ self.gram @ dy)


def flat_metric(dim: int) -> FlatMetric:
    """Build the flat metric for dimension N.

    Expanding 2 tr(d_rho^2) with the last diagonal eliminated gives a block
    structure: 2(I + ones) on the N-1 retained diagonals and 4I on the
    off-diagonal Re/Im pairs.  d(N) is computed from the determinant, never
    hard-coded.
    """
    if dim < 2:
        raise InvalidDimension(f"metric needs dim >= 2, got {dim}")
    n_diag = dim - 1
    n_off = dim * dim - dim
    size = n_diag + n_off
    gram = np.zeros((size, size))
    gram[:n_diag, :n_diag] = 2.0 * (np.eye(n_diag) + np.ones((n_diag, n_diag)))
    gram[n_diag:, n_diag:] = 4.0 * np.eye(n_off)
    sign, logdet = np.linalg.slogdet(gram)
    if sign <= 0:
        raise ValueError("flat metric gram must be positive definite")
    labels = [f"rho_{i}_{i}" for i in range(dim - 1)]
    for i in range(dim):
        for j in range(i + 1, dim):
            labels.append(f"re_{i}_{j}")
            labels.append(f"im_{i}_{j}")
    return FlatMetric(
        dim=dim,
        coordinate_labels=tuple(labels),
        gram=gram,
        det_sqrt=float(np.exp(0.5 * logdet)),
    )


def roundtrip_residual(rho: DensityMatrix, basis: OperatorBasis) -> float:
    """Max-norm error of reconstruct(decompose(rho)) vs rho."""
    coords = bloch_decompose(rho, basis)
    est = standard_reconstruct(coords.x, basis)
    return max_abs(est.matrix - rho.matrix)

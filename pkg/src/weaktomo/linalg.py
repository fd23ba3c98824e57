"""Dense complex linear algebra substrate and the quantum-state types the
rest of the library consumes.

Matrices are plain ``numpy.ndarray`` of ``complex128``; the classes here are
thin immutable wrappers that pin down the physical invariants (Hermiticity,
unit trace, positivity, normalization) at construction time.  Floating-point
equality is always tolerance-based; use :func:`max_abs` for max-norm
comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidRank,
    NonHermitianInput,
    ShapeMismatch,
)
from .rng import spawn_rng

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
NORMALIZATION_TOL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d complex array (no copy when already one)."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a 2-d array, got ndim={m.ndim}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def max_abs(a: np.ndarray) -> float:
    """Max-norm (largest entry magnitude); the library's matrix distance."""
    return float(np.max(np.abs(a))) if np.asarray(a).size else 0.0


def is_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    m = as_matrix(a)
    return m.shape[0] == m.shape[1] and max_abs(m - dagger(m)) <= tol


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + dagger(a)) / 2


def frobenius_inner(a, b) -> complex:
    """Trace inner product tr(A^dag B)."""
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise ShapeMismatch(f"shapes {ma.shape} and {mb.shape} differ")
    return complex(np.sum(ma.conj() * mb))


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector in an N-dimensional Hilbert space."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        norm_sq = float(np.sum(np.abs(amp) ** 2))
        if abs(norm_sq - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"state not normalized: sum |amp|^2 = {norm_sq!r}")
        object.__setattr__(self, "amplitudes", _freeze(amp.reshape(-1)))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def normalized(cls, vec) -> "PureState":
        """Build from an unnormalized vector."""
        v = np.asarray(vec, dtype=complex).reshape(-1)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(v / n)

    @classmethod
    def basis_state(cls, dim: int, index: int) -> "PureState":
        v = np.zeros(dim, dtype=complex)
        v[index] = 1.0
        return cls(v)

    def overlap(self, other: "PureState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector())


def validate_density_matrix(
    matrix: np.ndarray,
    herm_tol: float = HERMITICITY_TOL,
    trace_tol: float = TRACE_TOL,
    eig_floor: float = EIGENVALUE_FLOOR,
) -> None:
    """Raise ValueError unless ``matrix`` is a valid density matrix.

    Checks the three invariants: Hermiticity, unit trace, and eigenvalues
    above the positivity floor.
    """
    m = as_matrix(matrix)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"density matrix must be square, got {m.shape}")
    herm = max_abs(m - dagger(m))
    if herm > herm_tol:
        raise ValueError(f"not Hermitian: max |rho - rho^dag| = {herm:.3e}")
    tr = complex(np.trace(m))
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"trace is {tr!r}, expected 1")
    eigs = np.linalg.eigvalsh(hermitian_part(m))
    if eigs.min() < eig_floor:
        raise ValueError(f"negative eigenvalue {eigs.min():.3e} below floor {eig_floor:.1e}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """N x N Hermitian, unit-trace, positive-semidefinite state."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        validate_density_matrix(m)
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def pure(cls, state: PureState) -> "DensityMatrix":
        return cls(state.projector())

    def purity(self) -> float:
        """tr rho^2, in [1/N, 1]."""
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def expectation(self, operator: np.ndarray) -> complex:
        """tr(rho O)."""
        op = as_matrix(operator)
        if op.shape != self.matrix.shape:
            raise ShapeMismatch(f"operator shape {op.shape} vs state {self.matrix.shape}")
        return complex(np.trace(self.matrix @ op))


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    Eigenvalues are sorted descending; each eigenvector's phase is fixed by
    making its largest-magnitude component real and positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: tuple[PureState, ...]

    def reassemble(self) -> np.ndarray:
        """Sum of lambda_k |v_k><v_k|."""
        dim = self.eigenvectors[0].dim
        out = np.zeros((dim, dim), dtype=complex)
        for lam, vec in zip(self.eigenvalues, self.eigenvectors):
            out += lam * vec.projector()
        return out


def _canonical_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude component is real
    and positive (lowest index wins near-ties)."""
    mags = np.abs(vec)
    k = int(np.argmax(mags > mags.max() * (1 - 1e-12)))
    pivot = vec[k]
    if abs(pivot) == 0:
        return vec
    return vec * (abs(pivot) / pivot)


def hermitian_eig(matrix, tol: float = 1e-10) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix with deterministic ordering.

    Raises NonHermitianInput when the input violates the Hermiticity
    tolerance.
    """
    m = as_matrix(matrix)
    if m.shape[0] != m.shape[1] or max_abs(m - dagger(m)) > tol:
        raise NonHermitianInput(
            f"matrix is not Hermitian within {tol:.1e}"
        )
    vals, vecs = np.linalg.eigh(hermitian_part(m))
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    states = tuple(
        PureState(_canonical_phase(vecs[:, k])) for k in order
    )
    frozen = np.array(vals, dtype=float)
    frozen.setflags(write=False)
    return EigenDecomposition(eigenvalues=frozen, eigenvectors=states)


def random_density(dim: int, rank: int, seed: int) -> DensityMatrix:
    """Ginibre-induced random state of a given rank.

    rho = G G^dag / tr(G G^dag) with G an (dim x rank) matrix of independent
    standard complex normal entries.  Identical seeds give bitwise-identical
    states.
    """
    if not 1 <= rank <= dim:
        raise InvalidRank(f"rank must be in 1..{dim}, got {rank}")
    rng = spawn_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ dagger(g)
    m /= np.trace(m).real
    # round off the float dust so the strict constructor tolerances hold
    m = hermitian_part(m)
    return DensityMatrix(m)


def random_pure_state(dim: int, seed: int) -> PureState:
    """Haar-distributed pure state."""
    rng = spawn_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState.normalized(v)


def random_unitary(dim: int, seed: int) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    rng = spawn_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    # fix the R-diagonal phases; without this QR is not Haar
    d = np.diag(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True, eq=False)
class ReconstructedState:
    """Output of a linear tomography solve.

    The estimate is Hermitian with unit trace by construction, but noisy
    data can make it indefinite; no positivity projection is applied.  The
    flags record anomalies relative to the propagated noise scale:

    - ``"hermitization-exceeds-noise"``: the anti-Hermitian part removed
      during assembly was larger than 10x the propagated noise.
    - ``"negative-eigenvalue"``: an eigenvalue sits below -5x the noise
      scale (below -1e-10 for exact data).
    """

    matrix: np.ndarray
    min_eigenvalue: float
    hermitization_error: float
    noise_scale: float
    flags: tuple[str, ...] = ()
    diagnostics: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "matrix", _freeze(as_matrix(self.matrix)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_physical(self) -> bool:
        return not self.flags

    def to_density_matrix(self) -> DensityMatrix:
        """Validate against the strict DensityMatrix invariants.

        Only meaningful for (near-)exact data; noisy estimates may fail the
        positivity floor.
        """
        return DensityMatrix(hermitian_part(self.matrix))


def build_reconstruction(
    raw: np.ndarray,
    noise_scale: float = 0.0,
    diagnostics: tuple[tuple[str, float], ...] = (),
) -> ReconstructedState:
    """Hermitize, renormalize the trace, and flag anomalies.

    ``noise_scale`` is the propagated per-entry standard error of the raw
    estimate (0 for exact data); the thresholds for the validity flags scale
    with it.
    """
    raw = as_matrix(raw)
    herm_err = max_abs(raw - dagger(raw)) / 2
    m = hermitian_part(raw)
    tr = float(np.trace(m).real)
    if abs(tr) < 1e-6:
        raise ValueError(f"reconstruction trace {tr!r} too close to zero to renormalize")
    m = m / tr
    eigs = np.linalg.eigvalsh(m)
    flags = []
    if herm_err > max(10 * noise_scale, 1e-12):
        flags.append("hermitization-exceeds-noise")
    if eigs.min() < -max(5 * noise_scale, 1e-10):
        flags.append("negative-eigenvalue")
    return ReconstructedState(
        matrix=m,
        min_eigenvalue=float(eigs.min()),
        hermitization_error=float(herm_err),
        noise_scale=float(noise_scale),
        flags=tuple(flags),
        diagnostics=diagnostics,
    )

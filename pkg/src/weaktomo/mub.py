"""Mutually unbiased bases in prime dimension.

Two orthonormal bases are mutually unbiased when every cross overlap
satisfies |<u|v>|^2 = 1/N.  For prime N the standard quadratic Gauss-sum
construction yields a maximal family of N+1 such bases; that family is the
optimality witness for measurement design throughout the library.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotOrthonormal, NotPrime
from .linalg import PureState

ORTHONORMALITY_TOL = 1e-10


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in range(2, int(n**0.5) + 1):
        if n % p == 0:
            return False
    return True


@dataclass(frozen=True, eq=False)
class BasisFamily:
    """A list of orthonormal bases of the same Hilbert space."""

    dim: int
    bases: tuple[tuple[PureState, ...], ...]

    @property
    def count(self) -> int:
        return len(self.bases)

    def transformed(self, unitary: np.ndarray) -> "BasisFamily":
        """Apply one global unitary to every state."""
        new = tuple(
            tuple(PureState(unitary @ s.amplitudes) for s in basis)
            for basis in self.bases
        )
        return BasisFamily(dim=self.dim, bases=new)


def _check_orthonormal(basis: Sequence[PureState], tol: float) -> None:
    n = len(basis)
    g = np.array([[u.overlap(v) for v in basis] for u in basis])
    if np.max(np.abs(g - np.eye(n))) > tol:
        raise NotOrthonormal(f"basis fails orthonormality within {tol:.1e}")


def computational_basis(dim: int) -> tuple[PureState, ...]:
    return tuple(PureState.basis_state(dim, k) for k in range(dim))


def fourier_basis(dim: int) -> tuple[PureState, ...]:
    """Discrete-Fourier basis; unbiased to the computational basis for any N."""
    j = np.arange(dim)
    states = []
    for t in range(dim):
        phases = np.exp(2j * np.pi * ((j * t) % dim) / dim)
        states.append(PureState(phases / np.sqrt(dim)))
    return tuple(states)


def mub_prime(dim: int) -> BasisFamily:
    """Maximal family of N+1 mutually unbiased bases for prime N.

    The computational basis plus N bases whose vectors have components
    omega^(s j^2 + t j)/sqrt(N) (omega = exp(2 pi i/N), s indexes the basis,
    t the vector).  N=2 needs the quadratic phase replaced by the usual
    imaginary unit, which yields the three Pauli eigenbases.
    """
    if not is_prime(dim):
        raise NotPrime(f"construction requires prime dimension, got {dim}")
    bases: list[tuple[PureState, ...]] = [computational_basis(dim)]
    if dim == 2:
        sx = [PureState(np.array([1, 1]) / np.sqrt(2)), PureState(np.array([1, -1]) / np.sqrt(2))]
        sy = [PureState(np.array([1, 1j]) / np.sqrt(2)), PureState(np.array([1, -1j]) / np.sqrt(2))]
        bases.append(tuple(sx))
        bases.append(tuple(sy))
    else:
        j = np.arange(dim)
        for s in range(dim):
            basis = []
            for t in range(dim):
                exponent = (s * j * j + t * j) % dim
                basis.append(PureState(np.exp(2j * np.pi * exponent / dim) / np.sqrt(dim)))
            bases.append(tuple(basis))
    return BasisFamily(dim=dim, bases=tuple(bases))


def unbiasedness_deviation(
    basis_a: Sequence[PureState],
    basis_b: Sequence[PureState],
    orthonormality_tol: float = ORTHONORMALITY_TOL,
) -> float:
    """Max over state pairs of | |<u|v>|^2 - 1/N |; zero iff mutually unbiased."""
    if not basis_a or not basis_b:
        raise DimensionMismatch("empty basis")
    dim = basis_a[0].dim
    if any(s.dim != dim for s in basis_a) or any(s.dim != dim for s in basis_b):
        raise DimensionMismatch("bases live in different dimensions")
    _check_orthonormal(basis_a, orthonormality_tol)
    _check_orthonormal(basis_b, orthonormality_tol)
    worst = 0.0
    for u in basis_a:
        for v in basis_b:
            worst = max(worst, abs(abs(u.overlap(v)) ** 2 - 1.0 / dim))
    return worst


def family_max_deviation(family: BasisFamily) -> float:
    """Largest unbiasedness deviation over all distinct basis pairs."""
    worst = 0.0
    for a in range(family.count):
        for b in range(a + 1, family.count):
            worst = max(worst, unbiasedness_deviation(family.bases[a], family.bases[b]))
    return worst

import numpy as np
import pytest

from weaktomo import (
    DensityMatrix,
    InvalidRank,
    NonHermitianInput,
    PureState,
    ShapeMismatch,
    frobenius_inner,
    hermitian_eig,
    max_abs,
    random_density,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


class TestHermitianEig:
    def test_identity(self):
        eig = hermitian_eig(np.eye(2))
        assert np.allclose(eig.eigenvalues, [1.0, 1.0])
        g = np.array([[u.overlap(v) for v in eig.eigenvectors] for u in eig.eigenvectors])
        assert max_abs(g - np.eye(2)) <= 1e-10

    def test_sigma_z(self):
        eig = hermitian_eig(SZ)
        assert np.allclose(eig.eigenvalues, [1.0, -1.0])
        assert max_abs(eig.eigenvectors[0].amplitudes - [1, 0]) <= 1e-12
        assert max_abs(eig.eigenvectors[1].amplitudes - [0, 1]) <= 1e-12

    def test_random_hermitian_reassembly(self):
        rng = np.random.default_rng(42)
        a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        h = a + a.conj().T
        eig = hermitian_eig(h)
        assert max_abs(eig.reassemble() - h) <= 1e-10

    def test_descending_order_and_orthonormality(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        eig = hermitian_eig(a + a.conj().T)
        assert np.all(np.diff(eig.eigenvalues) <= 1e-12)
        g = np.array([[u.overlap(v) for v in eig.eigenvectors] for u in eig.eigenvectors])
        assert max_abs(g - np.eye(6)) <= 1e-10

    def test_non_hermitian_rejected(self):
        with pytest.raises(NonHermitianInput):
            hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


class TestRandomDensity:
    def test_rank_one_is_pure(self):
        rho = random_density(2, 1, seed=123)
        assert max_abs(rho.matrix @ rho.matrix - rho.matrix) <= 1e-10

    def test_determinism(self):
        a = random_density(3, 3, seed=7)
        b = random_density(3, 3, seed=7)
        assert np.array_equal(a.matrix, b.matrix)

    def test_rank_counts_eigenvalues(self):
        rho = random_density(4, 2, seed=1)
        eigs = np.linalg.eigvalsh(rho.matrix)
        assert np.sum(eigs > 1e-10) == 2

    def test_invalid_rank(self):
        with pytest.raises(InvalidRank):
            random_density(3, 0, seed=0)
        with pytest.raises(InvalidRank):
            random_density(3, 4, seed=0)

    def test_invariants_hold_everywhere(self):
        # shared validator runs inside the constructor; spot-check spectra
        for seed in range(25):
            rho = random_density(4, 1 + seed % 4, seed=seed)
            eigs = np.linalg.eigvalsh(rho.matrix)
            assert abs(eigs.sum() - 1.0) <= 1e-10
            assert eigs.min() >= -1e-10

    def test_purity_range_many_seeds(self):
        for seed in range(10_000):
            purity = random_density(2, 2, seed=seed).purity()
            assert 0.5 - 1e-12 <= purity <= 1.0 + 1e-12


class TestFrobeniusInner:
    def test_identity(self):
        for n in (2, 3, 5):
            assert frobenius_inner(np.eye(n), np.eye(n)) == pytest.approx(n)

    def test_orthogonal_paulis(self):
        assert abs(frobenius_inner(SX, SY)) <= 1e-14

    def test_pauli_norm(self):
        assert frobenius_inner(SZ, SZ) == pytest.approx(2.0)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            frobenius_inner(np.eye(2), np.eye(3))


class TestStateTypes:
    def test_pure_state_norm_enforced(self):
        with pytest.raises(ValueError):
            PureState(np.array([1.0, 1.0]))
        s = PureState.normalized(np.array([1.0, 1.0]))
        assert s.dim == 2
        assert abs(np.linalg.norm(s.amplitudes) - 1) <= 1e-12

    def test_density_invariants_enforced(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.array([[0.5, 0.1], [0.3, 0.5]]))  # not Hermitian
        with pytest.raises(ValueError):
            DensityMatrix(np.eye(2))  # trace 2
        with pytest.raises(ValueError):
            DensityMatrix(np.diag([1.5, -0.5]).astype(complex))  # negative eigenvalue

    def test_immutability(self):
        rho = random_density(2, 2, seed=5)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 0.0

    def test_eigenvalues_of_state_sum_to_one(self):
        for seed in range(20):
            rho = random_density(5, 3, seed=seed)
            eig = hermitian_eig(rho.matrix)
            assert abs(eig.eigenvalues.sum() - 1.0) <= 1e-10

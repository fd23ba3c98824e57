import numpy as np
import pytest

from weaktomo import (
    DensityMatrix,
    DimensionMismatch,
    NoiseModel,
    NonHermitianObservable,
    PostSelectionImpossible,
    PureState,
    exact_weak_value,
    random_density,
    strong_expectation,
    weak_expectation,
    weak_value_estimate,
)

SZ = np.array([[1, 0], [0, -1]], dtype=complex)
GROUND = DensityMatrix(np.diag([1.0, 0.0]).astype(complex))
MIXED = DensityMatrix.maximally_mixed(2)
PLUS = PureState(np.array([1, 1]) / np.sqrt(2))


class TestWeakExpectation:
    def test_identity_observable(self):
        noise = NoiseModel(delta_w=2.0, ensemble_size=100_000, seed=1)
        rec = weak_expectation(MIXED, np.eye(2), noise)
        assert rec.estimate == pytest.approx(1.0, abs=5 * 2.0 / np.sqrt(noise.ensemble_size))
        assert rec.std_error == pytest.approx(2.0 / np.sqrt(noise.ensemble_size), rel=0.05)

    def test_mixed_state_noise_dominated(self):
        # variance per trial = delta_w^2 + Var(sigma_z) = 100 + 1
        noise = NoiseModel(delta_w=10.0, ensemble_size=1_000_000, seed=2)
        rec = weak_expectation(MIXED, SZ, noise)
        assert abs(rec.estimate) <= 5 * np.sqrt(101) / 1e3

    def test_eigenstate_variance(self):
        noise = NoiseModel(delta_w=10.0, ensemble_size=1_000_000, seed=3)
        rec = weak_expectation(GROUND, SZ, noise)
        assert abs(rec.estimate - 1.0) <= 5 * rec.std_error
        assert rec.sample_variance == pytest.approx(100.0, rel=0.02)

    def test_unbiased_over_repetitions(self):
        rho = random_density(2, 2, seed=8)
        truth = float(np.real(rho.expectation(SZ)))
        estimates, errors = [], []
        for rep in range(200):
            rec = weak_expectation(rho, SZ, NoiseModel(delta_w=2.0, ensemble_size=2000, seed=rep))
            estimates.append(rec.estimate.real)
            errors.append(rec.std_error)
        mean = np.mean(estimates)
        se_of_mean = np.mean(errors) / np.sqrt(200)
        assert abs(mean - truth) < 5 * se_of_mean

    def test_determinism(self):
        noise = NoiseModel(delta_w=1.0, ensemble_size=5000, seed=77)
        a = weak_expectation(MIXED, SZ, noise)
        b = weak_expectation(MIXED, SZ, noise)
        assert a.estimate == b.estimate
        assert a.std_error == b.std_error

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianObservable):
            weak_expectation(MIXED, np.array([[0, 1], [0, 0]]), NoiseModel(1.0, 10, 0))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            weak_expectation(MIXED, np.eye(3), NoiseModel(1.0, 10, 0))


class TestVarianceLaw:
    @pytest.mark.parametrize("rho,var_a", [(GROUND, 0.0), (MIXED, 1.0)])
    def test_per_trial_variance(self, rho, var_a):
        noise = NoiseModel(delta_w=5.0, ensemble_size=1_000_000, seed=11)
        rec = weak_expectation(rho, SZ, noise)
        assert rec.sample_variance == pytest.approx(25.0 + var_a, rel=0.03)

    def test_state_dependence_shrinks_with_noise(self):
        # relative spread between states bounded by (spectral spread / delta_w)^2
        for delta_w, n in ((5.0, 1_000_000), (50.0, 4_000_000)):
            v = [
                weak_expectation(rho, SZ, NoiseModel(delta_w, n, seed=21)).sample_variance
                for rho in (GROUND, MIXED)
            ]
            rel = abs(v[0] - v[1]) / np.mean(v)
            assert rel <= (2.0 / delta_w) ** 2


class TestStrongExpectation:
    def test_eigenstate_readings_exact(self):
        rec = strong_expectation(GROUND, SZ, ensemble_size=1000, seed=4)
        assert rec.estimate == 1.0
        assert rec.std_error == 0.0

    def test_mixed_state_quantum_variance(self):
        rec = strong_expectation(MIXED, SZ, ensemble_size=1_000_000, seed=5)
        assert rec.sample_variance == pytest.approx(1.0, rel=0.02)

    def test_identity_zero_variance(self):
        rec = strong_expectation(MIXED, np.eye(2), ensemble_size=1000, seed=6)
        assert rec.std_error == 0.0
        assert rec.estimate == pytest.approx(1.0)


class TestWeakValues:
    def test_identity_operator(self):
        rho = random_density(3, 2, seed=31)
        post = PureState.normalized(np.array([1.0, 0.5, 0.25j]))
        assert exact_weak_value(rho, np.eye(3), post) == pytest.approx(1.0)

    def test_post_selected_on_own_state(self):
        rng = np.random.default_rng(0)
        s = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        s = s + s.conj().T
        rho = DensityMatrix.pure(PLUS)
        expected = complex(PLUS.amplitudes.conj() @ s @ PLUS.amplitudes)
        assert exact_weak_value(rho, s, PLUS) == pytest.approx(expected)

    def test_projector_weak_value_direct_trace_oracle(self):
        s = np.diag([1.0, 0.0]).astype(complex)  # |0><0|
        pb = PLUS.projector()
        oracle = np.trace(MIXED.matrix @ pb @ s) / np.trace(MIXED.matrix @ pb)
        value = exact_weak_value(MIXED, s, PLUS)
        assert value == pytest.approx(oracle)
        assert value == pytest.approx(0.5)

    def test_post_selection_impossible(self):
        with pytest.raises(PostSelectionImpossible):
            exact_weak_value(GROUND, SZ, PureState.basis_state(2, 1))

    def test_estimate_noise_model(self):
        rho = random_density(2, 2, seed=41)
        noise = NoiseModel(delta_w=1.0, ensemble_size=10_000, seed=9)
        rec = weak_value_estimate(rho, np.diag([1.0, 0.0]), PLUS, noise)
        p_b = float(np.real(PLUS.amplitudes.conj() @ rho.matrix @ PLUS.amplitudes))
        assert rec.std_error == pytest.approx(1.0 / np.sqrt(10_000 * p_b))
        assert abs(rec.estimate - rec.truth_hint) <= 5 * rec.std_error * np.sqrt(2)

    def test_estimate_determinism(self):
        noise = NoiseModel(delta_w=1.0, ensemble_size=100, seed=13)
        a = weak_value_estimate(MIXED, np.diag([1.0, 0.0]), PLUS, noise)
        b = weak_value_estimate(MIXED, np.diag([1.0, 0.0]), PLUS, noise)
        assert a.estimate == b.estimate

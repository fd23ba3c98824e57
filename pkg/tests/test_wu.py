import numpy as np
import pytest

from weaktomo import (
    DensityMatrix,
    IncompletePostSelectionFamily,
    InconsistentRatios,
    NoiseModel,
    PureState,
    WuConfiguration,
    WuWeakData,
    computational_basis,
    derive_seed,
    exact_weak_value,
    fourier_basis,
    max_abs,
    random_density,
    random_pure_state,
    random_unitary,
    wu_exact_data,
    wu_feasibility,
    wu_p_free_reconstruct,
    wu_reconstruct_in_a,
    wu_reconstruct_in_b,
    wu_simulated_data,
)


def haar_basis(dim, seed):
    u = random_unitary(dim, seed)
    return tuple(PureState(u[:, k]) for k in range(dim))


def random_posts(dim, count, seed, beta_floor=0.05):
    """Post states whose overlaps with the computational basis clear a floor."""
    posts = []
    attempt = 0
    while len(posts) < count:
        attempt += 1
        s = random_pure_state(dim, derive_seed(seed, attempt))
        if np.min(np.abs(s.amplitudes)) > beta_floor:
            posts.append(s)
        assert attempt < 500
    return tuple(posts)


class TestExactData:
    def test_maximally_mixed(self):
        config = WuConfiguration.build(computational_basis(3), random_posts(3, 2, seed=1))
        data = wu_exact_data(DensityMatrix.maximally_mixed(3), config)
        assert max_abs(data.w - np.abs(config.beta) ** 2) <= 1e-12
        assert np.allclose(data.p, 1 / 3)

    def test_rows_sum_to_one(self):
        config = WuConfiguration.build(haar_basis(4, 2), random_posts(4, 3, seed=2))
        rho = random_density(4, 2, seed=3)
        data = wu_exact_data(rho, config)
        assert max_abs(data.w.sum(axis=1) - 1.0) <= 1e-12

    def test_matches_weak_value_module(self):
        config = WuConfiguration.build(haar_basis(3, 4), random_posts(3, 2, seed=5))
        rho = random_density(3, 3, seed=6)
        data = wu_exact_data(rho, config)
        for j, post in enumerate(config.post_states):
            for i, a in enumerate(config.a_basis):
                oracle = exact_weak_value(rho, a.projector(), post)
                assert abs(data.w[j, i] - oracle) <= 1e-12

    def test_defining_identity(self):
        # w[j,i] * p[j] = <a_i|rho|b_j><b_j|a_i>
        config = WuConfiguration.build(haar_basis(3, 7), random_posts(3, 3, seed=8))
        rho = random_density(3, 2, seed=9)
        data = wu_exact_data(rho, config)
        for j, post in enumerate(config.post_states):
            for i, a in enumerate(config.a_basis):
                ai, bj = a.amplitudes, post.amplitudes
                oracle = (ai.conj() @ rho.matrix @ bj) * (bj.conj() @ ai)
                assert abs(data.w[j, i] * data.p[j] - oracle) <= 1e-12


class TestReconstructInA:
    def test_maximally_mixed(self):
        config = WuConfiguration.build(computational_basis(3), fourier_basis(3))
        data = wu_exact_data(DensityMatrix.maximally_mixed(3), config)
        out = wu_reconstruct_in_a(data, config)
        assert max_abs(out - np.eye(3) / 3) <= 1e-12

    def test_random_state_fourier_posts(self):
        a_basis = haar_basis(3, 10)
        config = WuConfiguration.build(a_basis, fourier_basis(3))
        rho = random_density(3, 3, seed=11)
        data = wu_exact_data(rho, config)
        out = wu_reconstruct_in_a(data, config)
        amat = np.column_stack([s.amplitudes for s in a_basis])
        assert max_abs(out - amat.conj().T @ rho.matrix @ amat) <= 1e-10

    def test_incomplete_family_rejected(self):
        config = WuConfiguration.build(computational_basis(3), fourier_basis(3)[:2])
        data = wu_exact_data(random_density(3, 2, seed=12), config)
        with pytest.raises(IncompletePostSelectionFamily):
            wu_reconstruct_in_a(data, config)

    def test_incomplete_family_breaks_identity(self):
        # the raw sum with a truncated family misses the completeness step;
        # residual is macroscopic, which is what the precondition guards
        a_basis = computational_basis(3)
        config = WuConfiguration.build(a_basis, fourier_basis(3)[:2])
        rho = random_density(3, 2, seed=13)
        data = wu_exact_data(rho, config)
        out = np.empty((3, 3), dtype=complex)
        for i in range(3):
            for j in range(3):
                out[i, j] = np.sum(data.p * config.beta[:, j] / config.beta[:, i] * data.w[:, i])
        residual = max_abs(out - rho.matrix)  # a-basis == computational here
        assert residual > 1e-3


class TestReconstructInB:
    def test_diagonal_is_probability(self):
        config = WuConfiguration.build(haar_basis(3, 14), random_posts(3, 2, seed=15))
        rho = random_density(3, 2, seed=16)
        data = wu_exact_data(rho, config)
        out = wu_reconstruct_in_b(data, config)
        for j in range(config.post_count):
            assert abs(out[j, j] - data.p[j]) <= 1e-12

    @pytest.mark.parametrize("dim", [2, 3, 4, 6])
    def test_random_orthonormal_posts(self, dim):
        a_basis = haar_basis(dim, dim)
        posts = haar_basis(dim, dim + 100)
        config = WuConfiguration.build(a_basis, posts)
        rho = random_density(dim, dim, seed=dim + 1)
        data = wu_exact_data(rho, config)
        out = wu_reconstruct_in_b(data, config)
        bmat = np.column_stack([s.amplitudes for s in posts])
        assert max_abs(out - bmat.conj().T @ rho.matrix @ bmat) <= 1e-10

    def test_arbitrary_non_orthonormal_posts(self):
        # the identity only needs completeness of the eigenbasis
        config = WuConfiguration.build(haar_basis(4, 17), random_posts(4, 5, seed=18))
        rho = random_density(4, 3, seed=19)
        data = wu_exact_data(rho, config)
        out = wu_reconstruct_in_b(data, config)
        for i, si in enumerate(config.post_states):
            for j, sj in enumerate(config.post_states):
                oracle = si.amplitudes.conj() @ rho.matrix @ sj.amplitudes
                assert abs(out[i, j] - oracle) <= 1e-10

    def test_post_state_density(self):
        # rho = |b_0><b_0|: the table is the rank-1 outer product of the
        # overlaps v_i = <b_i|b_0> (posts must not be orthogonal to b_0,
        # otherwise their post-selection probability vanishes)
        posts = (
            PureState(np.array([1, 1]) / np.sqrt(2)),
            PureState(np.array([np.cos(0.3), np.sin(0.3)]).astype(complex)),
        )
        config = WuConfiguration.build(computational_basis(2), posts)
        rho = DensityMatrix.pure(posts[0])
        data = wu_exact_data(rho, config)
        out = wu_reconstruct_in_b(data, config)
        v = np.array([s.overlap(posts[0]) for s in posts])
        assert abs(out[0, 0] - 1.0) <= 1e-12
        assert max_abs(out - np.outer(v, v.conj())) <= 1e-12


class TestPFree:
    def test_round_trip(self):
        config = WuConfiguration.build(haar_basis(3, 20), haar_basis(3, 21))
        rho = random_density(3, 3, seed=22)
        data = wu_exact_data(rho, config)
        est = wu_p_free_reconstruct(data, config)
        assert max_abs(est.matrix - rho.matrix) <= 1e-10
        assert dict(est.diagnostics)["p_consistency_residual"] <= 1e-12

    def test_maximally_mixed_structure(self):
        config = WuConfiguration.build(computational_basis(3), fourier_basis(3))
        data = wu_exact_data(DensityMatrix.maximally_mixed(3), config)
        assert np.allclose(data.p, 1 / 3)
        assert max_abs(data.x - np.eye(3)) <= 1e-12

    def test_agrees_with_p_using_path(self):
        config = WuConfiguration.build(haar_basis(4, 23), haar_basis(4, 24))
        rho = random_density(4, 2, seed=25)
        data = wu_exact_data(rho, config)
        bmat = np.column_stack([s.amplitudes for s in config.post_states])
        via_p = bmat @ wu_reconstruct_in_b(data, config) @ bmat.conj().T
        est = wu_p_free_reconstruct(data, config)
        assert max_abs(est.matrix - via_p) <= 1e-10

    def test_perturbed_data_rejected(self):
        config = WuConfiguration.build(haar_basis(3, 26), haar_basis(3, 27))
        rho = random_density(3, 2, seed=28)
        data = wu_exact_data(rho, config)
        x = np.array(data.x)
        x[0, 1] += 1e-2
        bad = WuWeakData(w=data.w, p=data.p, x=x)
        with pytest.raises(InconsistentRatios):
            wu_p_free_reconstruct(bad, config)

    def test_incomplete_family_rejected(self):
        config = WuConfiguration.build(computational_basis(3), fourier_basis(3)[:2])
        data = wu_exact_data(random_density(3, 2, seed=29), config)
        with pytest.raises(IncompletePostSelectionFamily):
            wu_p_free_reconstruct(data, config)


class TestSimulatedData:
    def test_small_noise_matches_exact(self):
        config = WuConfiguration.build(computational_basis(3), fourier_basis(3))
        rho = random_density(3, 2, seed=30)
        exact = wu_exact_data(rho, config)
        sim = wu_simulated_data(rho, config, NoiseModel(delta_w=1e-4, ensemble_size=10_000, seed=31))
        assert max_abs(sim.w - exact.w) <= 1e-3
        assert max_abs(sim.p - exact.p) <= 1e-2

    def test_determinism(self):
        config = WuConfiguration.build(computational_basis(2), fourier_basis(2))
        rho = random_density(2, 2, seed=32)
        noise = NoiseModel(delta_w=1.0, ensemble_size=100, seed=33)
        a = wu_simulated_data(rho, config, noise)
        b = wu_simulated_data(rho, config, noise)
        assert np.array_equal(a.w, b.w)
        assert np.array_equal(a.p, b.p)


class TestFeasibility:
    def test_known_matches(self):
        assert wu_feasibility(3, 2).verdict == "exact-match"
        assert wu_feasibility(3, 2).real_data_count == 8
        assert wu_feasibility(5, 3).verdict == "exact-match"
        assert wu_feasibility(5, 3).real_data_count == 24

    def test_even_dimension_never_matches(self):
        for dim in (2, 4, 6, 8, 10, 12):
            fes = wu_feasibility(dim, 1)
            assert fes.exact_match_post_count is None
            assert not fes.exact_match_possible
            for m in range(1, 13):
                assert wu_feasibility(dim, m).verdict != "exact-match"

    def test_brute_force_agreement(self):
        for dim in range(2, 13):
            for m in range(1, 13):
                fes = wu_feasibility(dim, m)
                data, needed = 2 * m * (dim - 1), dim * dim - 1
                expected = (
                    "exact-match" if data == needed
                    else "under-determined" if data < needed
                    else "over-determined"
                )
                assert fes.verdict == expected
                if fes.verdict == "exact-match":
                    assert dim % 2 == 1 and m == (dim + 1) // 2

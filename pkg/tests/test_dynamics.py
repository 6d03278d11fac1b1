import io

import numpy as np
import pytest

from graphkalman import (
    DynamicalSystem,
    Polynomial,
    build_shift,
    covariance_sequence,
    cycle_graph,
    eval_filter,
    observe,
    propagate_covariance,
    simulate,
    step_state,
    trajectory_to_csv,
)
from graphkalman.seeding import child_sequence, generator
from graphkalman.spectral import minimal_polynomial
from graphkalman.verify import random_system


def _cycle_system(n, a, b, sigma, sigma_tilde, horizon, h0=None, allow_zero=False):
    shift = build_shift(cycle_graph(n), "laplacian")
    return DynamicalSystem.from_constant(
        shift, a, b, sigma, sigma_tilde, horizon,
        initial_covariance=h0, allow_zero_noise=allow_zero,
    )


class TestConstruction:
    def test_zero_noise_rejected_by_default(self):
        with pytest.raises(ValueError, match="positive"):
            _cycle_system(4, Polynomial.one(), Polynomial.one(), 0.0, 1.0, 5)

    def test_zero_noise_reference_mode(self):
        sys = _cycle_system(4, Polynomial.one(), Polynomial.one(), 0.0, 0.0, 5, allow_zero=True)
        assert sys.state_sigma(1) == 0.0

    def test_negative_noise_always_rejected(self):
        with pytest.raises(ValueError):
            _cycle_system(4, Polynomial.one(), Polynomial.one(), -0.1, 1.0, 5, allow_zero=True)

    def test_step_accessors_range_checked(self):
        sys = _cycle_system(4, Polynomial.one(), Polynomial.one(), 1.0, 1.0, 3)
        with pytest.raises(ValueError):
            sys.state_poly(0)
        with pytest.raises(ValueError):
            sys.observation_sigma(4)

    def test_time_varying_accessors(self):
        shift = build_shift(cycle_graph(4), "laplacian")
        sys = DynamicalSystem.from_sequences(
            shift,
            state_polys=[Polynomial.one(), Polynomial.identity()],
            observation_polys=[Polynomial.one(), Polynomial.one()],
            sigmas=[1.0, 2.0],
            sigma_tildes=[0.5, 0.5],
        )
        assert sys.horizon == 2
        assert sys.state_poly(2) == Polynomial.identity()
        assert sys.state_sigma(2) == 2.0


class TestStepState:
    def test_zero_dynamics_is_pure_noise(self):
        sys = _cycle_system(4, Polynomial.zero(), Polynomial.one(), 1.0, 1.0, 3)
        rng = generator(50)
        expected = generator(50).standard_normal(4)
        x = step_state(sys, np.array([5.0, -1.0, 2.0, 0.0]), 1, rng)
        np.testing.assert_array_equal(x, expected)

    def test_identity_dynamics_zero_noise_keeps_state(self):
        sys = _cycle_system(4, Polynomial.one(), Polynomial.one(), 0.0, 0.0, 3, allow_zero=True)
        x_prev = np.array([1.0, 2.0, 3.0, 4.0])
        x = step_state(sys, x_prev, 1, generator(51))
        np.testing.assert_array_equal(x, x_prev)

    def test_dense_oracle_on_cycle30(self, c30):
        _, shift, _, _ = c30
        sys = DynamicalSystem.from_constant(
            shift, Polynomial((0.0, 0.25)), Polynomial((1.0, -0.5)), 0.3, 0.5, 10
        )
        x_prev = generator(52).standard_normal(30)
        x = step_state(sys, x_prev, 1, generator(53))
        dense = (shift.matrix / 4.0) @ x_prev + 0.3 * generator(53).standard_normal(30)
        np.testing.assert_allclose(x, dense, atol=1e-12)

    def test_out_of_range_step(self):
        sys = _cycle_system(4, Polynomial.one(), Polynomial.one(), 1.0, 1.0, 3)
        with pytest.raises(ValueError):
            step_state(sys, np.zeros(4), 4, generator(0))


class TestObserve:
    def test_identity_observation_zero_noise(self):
        sys = _cycle_system(4, Polynomial.one(), Polynomial.one(), 0.0, 0.0, 3, allow_zero=True)
        x = np.array([1.0, -1.0, 0.5, 2.0])
        np.testing.assert_array_equal(observe(sys, x, 1, generator(54)), x)

    def test_zero_observation_is_pure_noise(self):
        sys = _cycle_system(4, Polynomial.one(), Polynomial.zero(), 1.0, 2.0, 3)
        z = observe(sys, np.ones(4), 1, generator(55))
        np.testing.assert_array_equal(z, 2.0 * generator(55).standard_normal(4))

    def test_observation_matrix_is_half_adjacency(self, c30):
        # b(t) = 1 - t/2 on the cycle Laplacian realizes W/2
        graph, shift, decomposition, _ = c30
        b_matrix = eval_filter(Polynomial((1.0, -0.5)), decomposition).matrix
        np.testing.assert_allclose(b_matrix, graph.weight_matrix / 2.0, atol=1e-12)

    def test_dense_oracle(self, c30):
        graph, shift, _, _ = c30
        sys = DynamicalSystem.from_constant(
            shift, Polynomial((0.0, 0.25)), Polynomial((1.0, -0.5)), 0.3, 0.5, 10
        )
        x = generator(56).standard_normal(30)
        z = observe(sys, x, 2, generator(57))
        dense = (graph.weight_matrix / 2.0) @ x + 0.5 * generator(57).standard_normal(30)
        np.testing.assert_allclose(z, dense, atol=1e-12)


class TestCovarianceRecursion:
    def test_first_step_from_zero(self, c4):
        _, _, _, spectrum = c4
        p_s = minimal_polynomial(spectrum)
        h1 = propagate_covariance(Polynomial.zero(), Polynomial((0.2, 0.4)), 1.0, p_s)
        np.testing.assert_allclose(h1.coeffs, (1.0,), atol=1e-12)

    def test_zero_dynamics_keeps_noise_floor(self, c4):
        _, _, _, spectrum = c4
        p_s = minimal_polynomial(spectrum)
        h = propagate_covariance(Polynomial((0.7,)), Polynomial.zero(), 0.5, p_s)
        np.testing.assert_allclose(h.coeffs, (0.25,), atol=1e-12)

    def test_three_step_geometric_sum_oracle(self, c4):
        _, _, _, spectrum = c4
        sys = _cycle_system(4, Polynomial((0.0, 0.25)), Polynomial.one(), 0.3, 0.5, 3)
        hs = covariance_sequence(sys)
        lam = np.array([0.0, 2.0, 4.0])
        expected = 0.09 * (1.0 + (lam / 4.0) ** 2 + (lam / 4.0) ** 4)
        np.testing.assert_allclose(np.atleast_1d(hs[3](lam)), expected, atol=1e-12)

    def test_matrix_propagation_agreement(self):
        rng = generator(58)
        for _ in range(8):
            sys = random_system(rng, n_max=10, steps=20)
            hs = covariance_sequence(sys)
            cov = eval_filter(hs[0], sys.decomposition).matrix
            for k in range(1, sys.horizon + 1):
                a = eval_filter(sys.state_poly(k), sys.decomposition).matrix
                cov = a @ cov @ a.T + sys.state_sigma(k) ** 2 * np.eye(sys.n)
                gap = np.linalg.norm(cov - eval_filter(hs[k], sys.decomposition).matrix)
                assert gap <= 1e-8


class TestSimulate:
    def test_zero_horizon(self):
        sys = _cycle_system(4, Polynomial.one(), Polynomial.one(), 1.0, 1.0, 0)
        trajectory = simulate(sys, 1)
        assert trajectory.states.shape == (1, 4)
        assert trajectory.observations.shape == (0, 4)

    def test_all_zero_reference_mode(self):
        sys = _cycle_system(4, Polynomial.one(), Polynomial.one(), 0.0, 0.0, 5, allow_zero=True)
        trajectory = simulate(sys, 2)
        np.testing.assert_array_equal(trajectory.states, 0.0)
        np.testing.assert_array_equal(trajectory.observations, 0.0)

    def test_deterministic_given_seed(self):
        sys = _cycle_system(6, Polynomial((0.0, 0.25)), Polynomial((1.0, -0.5)), 0.3, 0.5, 12)
        t1 = simulate(sys, 99)
        t2 = simulate(sys, 99)
        np.testing.assert_array_equal(t1.states, t2.states)
        np.testing.assert_array_equal(t1.observations, t2.observations)

    def test_noise_streams_rederivable(self):
        sys = random_system(generator(59), n_max=8, steps=10, zero_initial=False)
        trajectory = simulate(sys, 4242)
        from graphkalman import apply_filter, sample

        x0 = sample(sys.initial_model, generator(child_sequence(trajectory.seed, 0)))
        np.testing.assert_array_equal(trajectory.states[0], x0)
        for k in range(1, sys.horizon + 1):
            e = generator(child_sequence(trajectory.seed, 2 * k - 1)).standard_normal(sys.n)
            drift = apply_filter(sys.state_poly(k), sys.shift, trajectory.states[k - 1])
            np.testing.assert_array_equal(trajectory.states[k], drift + sys.state_sigma(k) * e)
            e_obs = generator(child_sequence(trajectory.seed, 2 * k)).standard_normal(sys.n)
            read = apply_filter(sys.observation_poly(k), sys.shift, trajectory.states[k])
            np.testing.assert_array_equal(trajectory.observations[k - 1], read + sys.observation_sigma(k) * e_obs)

    def test_per_step_state_energy_tracks_covariance_trace(self, c30):
        # Monte-Carlo over 30 trials at the default configuration
        _, shift, _, _ = c30
        sys = DynamicalSystem.from_constant(
            shift, Polynomial((0.0, 0.25)), Polynomial((1.0, -0.5)), 0.3, 0.5, 100
        )
        hs = covariance_sequence(sys)
        lam = sys.decomposition.eigenvalues
        trials = 30
        energies = []
        for t in range(trials):
            trajectory = simulate(sys, np.random.SeedSequence(60, spawn_key=(t,)))
            energies.append([np.sum(trajectory.states[k] ** 2) for k in (10, 50, 100)])
        energies = np.array(energies)
        for column, k in enumerate((10, 50, 100)):
            expected = float(np.sum(np.atleast_1d(hs[k](lam))))
            observed = energies[:, column]
            stderr = np.std(observed, ddof=1) / np.sqrt(trials)
            assert abs(np.mean(observed) - expected) <= 3.0 * stderr


class TestCsvExport:
    def test_header_and_row_count(self):
        sys = _cycle_system(4, Polynomial.one(), Polynomial.one(), 1.0, 1.0, 3)
        trajectory = simulate(sys, 7)
        buffer = io.StringIO()
        trajectory_to_csv(trajectory, buffer)
        lines = buffer.getvalue().strip().split("\n")
        assert lines[0] == "k,vertex,x,z"
        assert len(lines) == 1 + 4 * (3 + 1)
        assert lines[1].startswith("0,1,") and lines[1].endswith(",")

    def test_deterministic_bytes(self):
        sys = _cycle_system(4, Polynomial.one(), Polynomial.one(), 1.0, 1.0, 3)
        buffers = []
        for _ in range(2):
            buffer = io.StringIO()
            trajectory_to_csv(simulate(sys, 7), buffer)
            buffers.append(buffer.getvalue())
        assert buffers[0] == buffers[1]

import numpy as np
import pytest

from graphkalman import (
    DynamicalSystem,
    NotAllPassError,
    Polynomial,
    build_shift,
    covariance_sequence,
    cycle_graph,
    eval_filter,
    inverse_error_covariance,
    inverse_estimate,
    loewner_less,
    riccati_sequence,
    spectral_loewner_less,
    zero_estimate,
)
from graphkalman.seeding import generator
from graphkalman.verify import random_system


class TestInverseEstimate:
    def test_unit_observation_returns_observation(self, c4):
        _, _, decomposition, _ = c4
        z = generator(80).standard_normal(4)
        np.testing.assert_allclose(inverse_estimate(Polynomial.one(), z, decomposition), z, atol=1e-12)

    def test_zero_observation_returns_zero(self, c4):
        _, _, decomposition, _ = c4
        z = generator(81).standard_normal(4)
        np.testing.assert_array_equal(inverse_estimate(Polynomial.zero(), z, decomposition), np.zeros(4))

    def test_singular_response_zeroes_that_eigenplane(self, c4):
        # 1 - t/2 vanishes at eigenvalue 2 of the cycle-4 Laplacian, so the
        # middle eigenplane is dropped and the rest divided by the response
        _, _, decomposition, _ = c4
        b = Polynomial((1.0, -0.5))
        z = generator(82).standard_normal(4)
        estimate = inverse_estimate(b, z, decomposition)
        u = decomposition.eigenvectors
        coefficients = u.T @ estimate
        raw = u.T @ z
        responses = np.atleast_1d(b(decomposition.eigenvalues))
        np.testing.assert_allclose(coefficients[0], raw[0] / responses[0], atol=1e-12)
        np.testing.assert_allclose(coefficients[1:3], 0.0, atol=1e-12)
        np.testing.assert_allclose(coefficients[3], raw[3] / responses[3], atol=1e-12)

    def test_batch_columns(self, c4):
        _, _, decomposition, _ = c4
        z = generator(83).standard_normal((4, 5))
        batched = inverse_estimate(Polynomial((1.0, 0.25)), z, decomposition)
        single = inverse_estimate(Polynomial((1.0, 0.25)), z[:, 2], decomposition)
        np.testing.assert_allclose(batched[:, 2], single, atol=1e-14)

    def test_wrong_length_rejected(self, c4):
        _, _, decomposition, _ = c4
        with pytest.raises(ValueError):
            inverse_estimate(Polynomial.one(), np.zeros(5), decomposition)


class TestInverseErrorCovariance:
    def test_unit_observation(self, c4):
        _, _, _, spectrum = c4
        poly = inverse_error_covariance(Polynomial.one(), 0.7, spectrum)
        np.testing.assert_allclose(poly.coeffs, (0.49,), atol=1e-12)

    def test_constant_two(self, c4):
        _, _, _, spectrum = c4
        poly = inverse_error_covariance(Polynomial.constant(2.0), 1.0, spectrum)
        np.testing.assert_allclose(poly.coeffs, (0.25,), atol=1e-12)

    def test_values_on_cycle30(self, c30):
        _, _, _, spectrum = c30
        poly = inverse_error_covariance(Polynomial((1.0, -0.5)), 0.5, spectrum)
        mu = spectrum.representatives
        expected = 0.25 / (1.0 - mu / 2.0) ** 2
        np.testing.assert_allclose(np.atleast_1d(poly(mu)), expected, rtol=1e-9)

    def test_not_all_pass_rejected(self, c4):
        _, _, _, spectrum = c4
        with pytest.raises(NotAllPassError):
            inverse_error_covariance(Polynomial((1.0, -0.5)), 0.5, spectrum)


class TestZeroEstimate:
    def test_estimate_is_zero_signal(self):
        sys = random_system(generator(84), n_max=8, steps=6)
        estimate, _ = zero_estimate(sys, 3)
        np.testing.assert_array_equal(estimate, np.zeros(sys.n))

    def test_first_step_error_covariance(self, c4):
        _, shift, _, _ = c4
        sys = DynamicalSystem.from_constant(
            shift, Polynomial((0.0, 0.25)), Polynomial.one(), 0.4, 1.0, 3
        )
        _, h1 = zero_estimate(sys, 1)
        np.testing.assert_allclose(h1.coeffs, (0.16,), atol=1e-12)

    def test_hundred_step_geometric_sum_oracle(self, c30):
        _, shift, _, _ = c30
        sys = DynamicalSystem.from_constant(
            shift, Polynomial((0.0, 0.25)), Polynomial((1.0, -0.5)), 0.3, 0.5, 100
        )
        _, h100 = zero_estimate(sys, 100)
        lam = sys.decomposition.eigenvalues
        ratios = (lam / 4.0) ** 2
        expected = 0.09 * np.array([np.sum(r ** np.arange(100)) for r in ratios])
        np.testing.assert_allclose(np.atleast_1d(h100(lam)), expected, rtol=1e-8)


class TestLoewner:
    def test_strict_example(self):
        cmp = loewner_less(np.eye(3), 2.0 * np.eye(3))
        assert cmp.verdict == "strict"
        np.testing.assert_allclose(cmp.min_eigenvalue, 1.0, atol=1e-12)

    def test_equal_operands_not_strict(self):
        cmp = loewner_less(np.eye(3), np.eye(3))
        assert cmp.verdict == "non-strict"

    def test_reversed_order_fails(self):
        cmp = loewner_less(2.0 * np.eye(3), np.eye(3))
        assert cmp.verdict == "fails"

    def test_asymmetric_rejected(self):
        bad = np.zeros((3, 3))
        bad[0, 1] = 1.0
        with pytest.raises(ValueError):
            loewner_less(bad, np.eye(3))

    def test_reference_system_strict_at_every_step(self, c30):
        # per-eigenvalue inequality: updated error * b^2 < observation noise^2
        _, shift, _, _ = c30
        sys = DynamicalSystem.from_constant(
            shift, Polynomial((0.0, 0.25)), Polynomial((1.0, -0.5)), 0.3, 0.5, 25
        )
        riccati = riccati_sequence(sys, p0=Polynomial.zero())
        inverse_poly = inverse_error_covariance(Polynomial((1.0, -0.5)), 0.5, sys.spectrum)
        inverse_matrix = eval_filter(inverse_poly, sys.decomposition).matrix
        for k in range(1, 26):
            p_matrix = eval_filter(riccati.error_polys[k - 1], sys.decomposition).matrix
            assert loewner_less(p_matrix, inverse_matrix).verdict == "strict"

    def test_matrix_and_spectral_verdicts_agree(self):
        rng = generator(85)
        for _ in range(10):
            sys = random_system(rng, n_max=10, steps=8, all_pass=True)
            riccati = riccati_sequence(sys)
            hs = covariance_sequence(sys)
            for k in (1, sys.horizon):
                left = riccati.error_polys[k - 1]
                right = hs[k]
                matrix_cmp = loewner_less(
                    eval_filter(left, sys.decomposition).matrix,
                    eval_filter(right, sys.decomposition).matrix,
                )
                spectral_cmp = spectral_loewner_less(left, right, sys.spectrum)
                assert matrix_cmp.verdict == spectral_cmp.verdict

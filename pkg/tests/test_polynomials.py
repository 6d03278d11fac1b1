import numpy as np
import pytest

from graphkalman import Polynomial, lagrange_interpolate, reduce_mod_minimal


class TestCanonicalForm:
    def test_trailing_zeros_trimmed(self):
        assert Polynomial((1.0, 2.0, 0.0, 0.0)).coeffs == (1.0, 2.0)

    def test_zero_polynomial(self):
        p = Polynomial((0.0, 0.0, 0.0))
        assert p.coeffs == (0.0,)
        assert p.is_zero
        assert p.degree == 0

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            Polynomial((1.0, float("nan")))

    def test_constructors(self):
        assert Polynomial.one().coeffs == (1.0,)
        assert Polynomial.identity().coeffs == (0.0, 1.0)
        assert Polynomial.constant(3.5).coeffs == (3.5,)


class TestArithmetic:
    def test_t_times_t(self):
        t = Polynomial.identity()
        assert (t * t).coeffs == (0.0, 0.0, 1.0)

    def test_add_zero_is_identity(self):
        f = Polynomial((2.0, -1.0, 3.0))
        assert f + Polynomial.zero() == f

    def test_difference_of_squares(self):
        t = Polynomial.identity()
        assert ((t + 1.0) * (t - 1.0)).coeffs == (-1.0, 0.0, 1.0)

    def test_scalar_operations(self):
        f = Polynomial((1.0, 2.0))
        assert (2.0 * f).coeffs == (2.0, 4.0)
        assert (f - 1.0).coeffs == (0.0, 2.0)

    def test_power(self):
        t = Polynomial.identity()
        assert ((t + 1.0) ** 2).coeffs == (1.0, 2.0, 1.0)
        with pytest.raises(ValueError):
            t ** -1

    def test_evaluation_scalar_and_array(self):
        f = Polynomial((1.0, 0.0, 1.0))  # 1 + t^2
        assert f(2.0) == 5.0
        np.testing.assert_array_equal(f(np.array([0.0, 1.0, 3.0])), [1.0, 2.0, 10.0])


class TestReduction:
    def test_cubic_mod_minimal(self):
        # t^3 = (t^3 - 6t^2 + 8t) * 1 + (6t^2 - 8t)
        t3 = Polynomial((0.0, 0.0, 0.0, 1.0))
        modulus = Polynomial((0.0, 8.0, -6.0, 1.0))
        remainder = reduce_mod_minimal(t3, modulus)
        np.testing.assert_allclose(remainder.coeffs, (0.0, -8.0, 6.0), atol=1e-12)

    def test_low_degree_unchanged(self):
        f = Polynomial((1.0, 2.0))
        modulus = Polynomial((0.0, 8.0, -6.0, 1.0))
        assert reduce_mod_minimal(f, modulus) == f

    def test_self_reduction_is_zero(self):
        modulus = Polynomial((0.0, 8.0, -6.0, 1.0))
        assert (modulus % modulus).is_zero

    def test_zero_modulus_rejected(self):
        with pytest.raises(ValueError):
            reduce_mod_minimal(Polynomial.one(), Polynomial.zero())

    def test_constant_modulus_rejected(self):
        with pytest.raises(ValueError):
            reduce_mod_minimal(Polynomial.identity(), Polynomial.constant(2.0))


class TestLagrangeInterpolation:
    def test_two_point_line(self):
        g = lagrange_interpolate([0.0, 1.0], [1.0, 2.0])
        np.testing.assert_allclose(g.coeffs, (1.0, 1.0), atol=1e-14)

    def test_single_node_constant(self):
        assert lagrange_interpolate([3.0], [7.5]) == Polynomial.constant(7.5)

    def test_identity_values(self):
        g = lagrange_interpolate([0.0, 2.0, 4.0], [0.0, 2.0, 4.0])
        np.testing.assert_allclose(g.coeffs, (0.0, 1.0), atol=1e-14)

    def test_duplicate_nodes_rejected(self):
        with pytest.raises(ValueError, match="distinct"):
            lagrange_interpolate([1.0, 1.0], [0.0, 1.0])

    def test_residual_bound_on_random_nodes(self):
        # documented contract: max_j |g(x_j) - y_j| <= 1e-7 * max|y|
        rng = np.random.default_rng(7)
        for _ in range(30):
            d = int(rng.integers(2, 31))
            nodes = np.sort(rng.uniform(-4.0, 4.0, d))
            if np.min(np.diff(nodes)) < 1e-3:
                continue
            values = rng.uniform(-3.0, 3.0, d)
            g = lagrange_interpolate(nodes, values)
            residual = np.max(np.abs(g(nodes) - values))
            assert residual <= 1e-7 * max(1e-30, np.max(np.abs(values)))

    def test_roundtrip_near_representation_floor_on_cosine_nodes(self, c30):
        # degree-15 interpolation over the cycle-30 spectrum is the
        # ill-conditioned case the exact operator construction exists for
        _, _, _, spectrum = c30
        rng = np.random.default_rng(11)
        values = rng.uniform(0.0, 1.0, spectrum.count)
        g = lagrange_interpolate(spectrum.representatives, values)
        assert np.max(np.abs(g(spectrum.representatives) - values)) <= 1e-10

    def test_matches_small_vandermonde_solve(self):
        # oracle: direct Vandermonde solve is stable at tiny degree
        nodes = np.array([-1.0, 0.5, 2.0])
        values = np.array([2.0, -0.5, 7.0])
        vandermonde = np.vander(nodes, 3, increasing=True)
        expected = np.linalg.solve(vandermonde, values)
        g = lagrange_interpolate(nodes, values)
        np.testing.assert_allclose(g.coeffs, expected, atol=1e-12)


class TestSerialization:
    def test_coefficient_list_roundtrip(self):
        f = Polynomial((0.0, 0.25))
        assert f.to_list() == [0.0, 0.25]
        assert Polynomial.from_coeffs(f.to_list()) == f

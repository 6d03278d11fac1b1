import numpy as np
import pytest

from graphkalman import (
    Polynomial,
    apply_filter,
    build_shift,
    cycle_graph,
    distinct_eigenvalues,
    eigendecompose,
    minimal_polynomial,
)
from graphkalman.verify import random_shift
from graphkalman.seeding import generator

from conftest import cycle_laplacian_eigenvalues


class TestEigendecompose:
    def test_c4_eigenvalues_match_cosine_oracle(self, c4):
        _, _, decomposition, _ = c4
        np.testing.assert_allclose(
            decomposition.eigenvalues, cycle_laplacian_eigenvalues(4), atol=1e-12
        )
        np.testing.assert_allclose(decomposition.eigenvalues, [0.0, 2.0, 2.0, 4.0], atol=1e-12)

    def test_identity_shift_spectrum(self):
        g = cycle_graph(5)
        shift = build_shift(g, "custom", matrix=np.eye(5))
        decomposition = eigendecompose(shift)
        np.testing.assert_allclose(decomposition.eigenvalues, 1.0, atol=0)

    def test_c30_range_and_absent_value(self, c30):
        _, _, decomposition, _ = c30
        lam = decomposition.eigenvalues
        np.testing.assert_allclose(lam, cycle_laplacian_eigenvalues(30), atol=1e-12)
        assert lam.min() >= -1e-12 and lam.max() <= 4.0 + 1e-12
        assert np.min(np.abs(lam - 2.0)) > 0.1  # 2 - 2cos(theta) = 2 has no node on C_30

    def test_orthogonality_and_reconstruction(self):
        rng = generator(21)
        for _ in range(6):
            shift = random_shift(rng, int(rng.integers(4, 12)))
            dec = eigendecompose(shift)
            u, lam = dec.eigenvectors, dec.eigenvalues
            n = shift.n
            assert np.linalg.norm(u.T @ u - np.eye(n)) <= 1e-10 * n
            recon = (u * lam) @ u.T
            assert np.linalg.norm(shift.matrix - recon) <= 1e-8 * max(1.0, np.linalg.norm(shift.matrix))

    def test_sign_convention_first_nonzero_positive(self):
        rng = generator(22)
        for _ in range(6):
            shift = random_shift(rng, 8)
            u = eigendecompose(shift).eigenvectors
            for col in u.T:
                leading = col[np.abs(col) > 1e-12 * np.max(np.abs(col))][0]
                assert leading > 0

    def test_deterministic_for_fixed_input(self, c30):
        _, shift, decomposition, _ = c30
        again = eigendecompose(shift)
        np.testing.assert_array_equal(again.eigenvalues, decomposition.eigenvalues)
        np.testing.assert_array_equal(again.eigenvectors, decomposition.eigenvectors)


class TestDistinctEigenvalues:
    def test_c4_groups(self, c4):
        _, _, _, spectrum = c4
        np.testing.assert_allclose(spectrum.representatives, [0.0, 2.0, 4.0], atol=1e-12)
        np.testing.assert_array_equal(spectrum.multiplicities, [1, 2, 1])

    def test_all_equal_single_group(self):
        shift = build_shift(cycle_graph(4), "custom", matrix=np.eye(4))
        spectrum = distinct_eigenvalues(eigendecompose(shift), tol=1e-8)
        assert spectrum.count == 1
        np.testing.assert_array_equal(spectrum.group_index, 0)

    def test_c30_has_sixteen_distinct_values(self, c30):
        _, _, _, spectrum = c30
        oracle = np.unique(np.round(cycle_laplacian_eigenvalues(30), 9))
        assert spectrum.count == 16 == oracle.size

    def test_negative_tolerance_rejected(self, c4):
        _, _, decomposition, _ = c4
        with pytest.raises(ValueError):
            distinct_eigenvalues(decomposition, tol=-1.0)

    def test_grouping_idempotent(self, c30):
        _, _, _, spectrum = c30
        gaps = np.diff(spectrum.representatives)
        assert np.all(gaps > spectrum.tol)

    def test_group_means_and_expand(self, c4):
        _, _, _, spectrum = c4
        values = np.array([1.0, 2.0, 4.0, 8.0])  # eigenindex order (0, 2, 2, 4)
        means = spectrum.group_means(values)
        np.testing.assert_allclose(means, [1.0, 3.0, 8.0])
        np.testing.assert_allclose(spectrum.expand(means), [1.0, 3.0, 3.0, 8.0])


class TestMinimalPolynomial:
    def test_three_roots(self, c4):
        _, _, _, spectrum = c4
        p = minimal_polynomial(spectrum)
        np.testing.assert_allclose(p.coeffs, (0.0, 8.0, -6.0, 1.0), atol=1e-12)

    def test_single_root(self):
        shift = build_shift(cycle_graph(4), "custom", matrix=2.5 * np.eye(4))
        spectrum = distinct_eigenvalues(eigendecompose(shift))
        p = minimal_polynomial(spectrum)
        np.testing.assert_allclose(p.coeffs, (-2.5, 1.0), atol=1e-12)

    def test_annihilates_shift(self):
        rng = generator(23)
        for _ in range(6):
            shift = random_shift(rng, int(rng.integers(4, 12)))
            spectrum = distinct_eigenvalues(eigendecompose(shift))
            p = minimal_polynomial(spectrum)
            image = apply_filter(p, shift, np.eye(shift.n))
            budget = 1e-8 * max(1.0, np.linalg.norm(shift.matrix, 2)) ** spectrum.count
            assert np.linalg.norm(image) <= budget

    def test_annihilates_cycle_laplacian(self, c30):
        _, shift, _, spectrum = c30
        p = minimal_polynomial(spectrum)
        image = apply_filter(p, shift, np.eye(30))
        assert np.linalg.norm(image) <= 1e-8 * 4.0 ** spectrum.count

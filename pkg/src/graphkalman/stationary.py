"""Stationary graph signals: covariance polynomials, coloring, whitening, fitting.

A zero-mean random signal is stationary when its covariance matrix is a
polynomial of the graph shift.  Such signals are generated by driving the
square-root filter with white noise, and mapped back to white noise by
inverting the nonzero frequency responses.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NotPositiveSemidefiniteError
from .filters import apply_filter, eval_filter
from .polynomials import Polynomial, lagrange_interpolate
from .spectral import DistinctSpectrum, SpectralDecomposition, distinct_eigenvalues

PSD_TOL_SCALE = 1e-10


@dataclass(frozen=True, eq=False)
class StationaryModel:
    """Covariance polynomial of a zero-mean stationary signal on a fixed shift."""

    covariance_poly: Polynomial
    decomposition: SpectralDecomposition
    spectrum: DistinctSpectrum

    @classmethod
    def create(
        cls,
        covariance_poly: Polynomial,
        decomposition: SpectralDecomposition,
        spectrum: DistinctSpectrum | None = None,
    ) -> "StationaryModel":
        if spectrum is None:
            spectrum = distinct_eigenvalues(decomposition)
        return cls(covariance_poly, decomposition, spectrum)

    @cached_property
    def frequency_variances(self) -> np.ndarray:
        """Raw variances h(lambda(n)), one per eigenindex."""
        values = np.atleast_1d(self.covariance_poly(self.decomposition.eigenvalues))
        values.flags.writeable = False
        return values

    @cached_property
    def group_variances(self) -> np.ndarray:
        """Raw variances at the distinct-eigenvalue representatives."""
        values = np.atleast_1d(self.covariance_poly(self.spectrum.representatives))
        values.flags.writeable = False
        return values

    @property
    def psd_tol(self) -> float:
        return PSD_TOL_SCALE * max(float(np.max(self.group_variances)), 0.0)

    @property
    def is_psd(self) -> bool:
        return bool(np.min(self.group_variances) >= -self.psd_tol)

    def clamped_group_variances(self) -> np.ndarray:
        """Group variances with tiny negative values clamped to zero.

        Raises:
            NotPositiveSemidefiniteError: if a variance is below -psd_tol.
        """
        values = self.group_variances
        if np.min(values) < -self.psd_tol:
            worst = float(np.min(values))
            raise NotPositiveSemidefiniteError(
                f"covariance polynomial has negative frequency variance {worst:g}"
            )
        return np.maximum(values, 0.0)


def sqrt_filter(model: StationaryModel) -> Polynomial:
    """Polynomial taking the value sqrt(variance) at every distinct eigenvalue."""
    variances = model.clamped_group_variances()
    return lagrange_interpolate(model.spectrum.representatives, np.sqrt(variances))


def sample(
    model: StationaryModel, rng: np.random.Generator, size: int | None = None
) -> np.ndarray:
    """Draw stationary signals by coloring standard white noise.

    Returns shape (n,) for ``size=None``, else (n, size).
    """
    g = sqrt_filter(model)
    n = model.decomposition.n
    shape = (n,) if size is None else (n, size)
    noise = rng.standard_normal(shape)
    return apply_filter(g, model.decomposition.shift, noise)


def whiten(x: np.ndarray, model: StationaryModel, rng: np.random.Generator) -> np.ndarray:
    """Recover white noise from a stationary signal.

    Frequencies with nonzero variance are rescaled by the inverse square
    root; null frequencies are filled with fresh standard normal draws, so
    the result has identity covariance.
    """
    x = np.asarray(x, dtype=float)
    n = model.decomposition.n
    if x.shape != (n,):
        raise ValueError(f"signal shape {x.shape} does not match graph order {n}")
    variances = model.spectrum.expand(model.clamped_group_variances())
    spectral = model.decomposition.eigenvectors.T @ x
    noise = np.empty(n)
    nonzero = variances > 0.0
    noise[nonzero] = spectral[nonzero] / np.sqrt(variances[nonzero])
    noise[~nonzero] = rng.standard_normal(int(np.count_nonzero(~nonzero)))
    return model.decomposition.eigenvectors @ noise


def fit_covariance_poly(
    matrix: np.ndarray,
    decomposition: SpectralDecomposition,
    spectrum: DistinctSpectrum,
) -> tuple[Polynomial, float]:
    """Least-squares fit of a covariance matrix by a polynomial of the shift.

    Returns the fitted polynomial (degree < number of distinct eigenvalues)
    and the relative residual ``||C - fit(S)||_F / max(1, ||C||_F)``.
    """
    c = np.asarray(matrix, dtype=float)
    n = decomposition.n
    if c.shape != (n, n):
        raise ValueError(f"matrix shape {c.shape} does not match graph order {n}")
    if not np.allclose(c, c.T, rtol=0.0, atol=1e-10 * max(1.0, np.linalg.norm(c))):
        raise ValueError("covariance matrix must be symmetric")
    u = decomposition.eigenvectors
    diagonal = np.einsum("in,ij,jn->n", u, c, u)
    group_values = spectrum.group_means(diagonal)
    poly = lagrange_interpolate(spectrum.representatives, group_values)
    fitted = eval_filter(poly, decomposition).matrix
    residual = np.linalg.norm(c - fitted) / max(1.0, np.linalg.norm(c))
    return poly, float(residual)

"""Symmetric eigendecomposition, distinct-eigenvalue grouping, and the minimal polynomial."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import NumericalFailureError
from .graphs import GraphShift
from .polynomials import Polynomial

DEFAULT_GROUPING_SCALE = 1e-8


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenpairs of a symmetric shift: S = U diag(eigenvalues) U^T.

    Eigenvalues are ascending; eigenvector signs are fixed so the first
    nonzero component of every column is positive.
    """

    shift: GraphShift
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))


def eigendecompose(shift: GraphShift) -> SpectralDecomposition:
    """Orthogonal eigendecomposition of a symmetric graph shift."""
    try:
        eigenvalues, vectors = np.linalg.eigh(shift.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigendecomposition failed: {exc}") from exc
    # sign convention: first component exceeding a relative threshold is positive
    n = eigenvalues.size
    threshold = 1e-12 * np.max(np.abs(vectors), axis=0)
    first_nonzero = np.argmax(np.abs(vectors) > threshold, axis=0)
    signs = np.sign(vectors[first_nonzero, np.arange(n)])
    vectors = vectors * signs
    eigenvalues.flags.writeable = False
    vectors.flags.writeable = False
    return SpectralDecomposition(shift=shift, eigenvalues=eigenvalues, eigenvectors=vectors)


@dataclass(frozen=True, eq=False)
class DistinctSpectrum:
    """Grouping of near-equal eigenvalues into distinct representatives.

    ``group_index[n]`` maps the n-th eigenvalue to its representative;
    representatives are strictly increasing and pairwise separated by more
    than ``tol``.
    """

    representatives: np.ndarray
    group_index: np.ndarray
    tol: float

    @property
    def count(self) -> int:
        return self.representatives.size

    @cached_property
    def multiplicities(self) -> np.ndarray:
        counts = np.bincount(self.group_index, minlength=self.count)
        counts.flags.writeable = False
        return counts

    def group_means(self, values: np.ndarray) -> np.ndarray:
        """Average per-eigenindex ``values`` within each group."""
        values = np.asarray(values, dtype=float)
        sums = np.bincount(self.group_index, weights=values, minlength=self.count)
        return sums / self.multiplicities

    def expand(self, group_values: np.ndarray) -> np.ndarray:
        """Broadcast per-group values back to per-eigenindex order."""
        return np.asarray(group_values, dtype=float)[self.group_index]


def default_grouping_tol(decomposition: SpectralDecomposition) -> float:
    return DEFAULT_GROUPING_SCALE * max(1.0, decomposition.spectral_radius)


def distinct_eigenvalues(
    decomposition: SpectralDecomposition, tol: float | None = None
) -> DistinctSpectrum:
    """Single-linkage grouping of ascending eigenvalues: a gap > tol starts a new group."""
    if tol is None:
        tol = default_grouping_tol(decomposition)
    if tol < 0:
        raise ValueError(f"grouping tolerance must be nonnegative, got {tol!r}")
    lam = decomposition.eigenvalues
    gaps = np.diff(lam)
    group_index = np.concatenate(([0], np.cumsum(gaps > tol)))
    count = group_index[-1] + 1
    sums = np.bincount(group_index, weights=lam, minlength=count)
    sizes = np.bincount(group_index, minlength=count)
    representatives = sums / sizes
    representatives.flags.writeable = False
    group_index.flags.writeable = False
    return DistinctSpectrum(representatives=representatives, group_index=group_index, tol=float(tol))


def minimal_polynomial(spectrum: DistinctSpectrum) -> Polynomial:
    """Monic polynomial with a simple root at each distinct eigenvalue."""
    if spectrum.count == 0:
        raise ValueError("spectrum has no eigenvalues")
    return Polynomial(tuple(npoly.polyfromroots(spectrum.representatives)))

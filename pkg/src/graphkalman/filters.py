"""Polynomial graph filters: spectral evaluation, spatial application, membership test."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .graphs import GraphShift
from .polynomials import Polynomial, lagrange_interpolate
from .spectral import DistinctSpectrum, SpectralDecomposition

MEMBERSHIP_TOL_SCALE = 1e-6


@dataclass(frozen=True, eq=False)
class FilterMatrix:
    """Dense filter matrix H = U diag(h(lambda)) U^T with its source polynomial."""

    matrix: np.ndarray
    poly: Polynomial
    decomposition: SpectralDecomposition

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=float)
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)


def eval_filter(poly: Polynomial, decomposition: SpectralDecomposition) -> FilterMatrix:
    """Assemble the dense filter matrix from frequency responses h(lambda(n))."""
    responses = poly(decomposition.eigenvalues)
    u = decomposition.eigenvectors
    matrix = (u * responses) @ u.T
    matrix = 0.5 * (matrix + matrix.T)
    return FilterMatrix(matrix=matrix, poly=poly, decomposition=decomposition)


def apply_filter(poly: Polynomial, shift: GraphShift, x: np.ndarray) -> np.ndarray:
    """Apply h(S) to a signal via Horner iteration of shift-vector products.

    Never forms h(S); works on a single signal of shape (n,) or a batch of
    columns of shape (n, m).
    """
    s = shift.matrix
    x = np.asarray(x, dtype=float)
    if x.shape[0] != shift.n:
        raise ValueError(f"signal length {x.shape[0]} does not match graph order {shift.n}")
    coeffs = poly.coeffs
    acc = coeffs[-1] * x
    for c in coeffs[-2::-1]:
        acc = s @ acc + c * x
    return acc


class MembershipResult(NamedTuple):
    is_member: bool
    witness: Polynomial | None


def is_polynomial_filter(
    matrix: np.ndarray,
    decomposition: SpectralDecomposition,
    spectrum: DistinctSpectrum,
    tol: float | None = None,
) -> MembershipResult:
    """Test whether a matrix is a polynomial of the shift.

    The matrix must be diagonal in the shift's eigenbasis with diagonal
    entries constant on each repeated-eigenvalue group, both within ``tol``
    (default ``1e-6 * ||matrix||_F``).  On success the witness is the
    interpolant through the per-group diagonal values.
    """
    m = np.asarray(matrix, dtype=float)
    n = decomposition.n
    if m.shape != (n, n):
        raise ValueError(f"matrix shape {m.shape} does not match graph order {n}")
    if tol is None:
        tol = MEMBERSHIP_TOL_SCALE * np.linalg.norm(m)
    u = decomposition.eigenvectors
    c = u.T @ m @ u
    diagonal = np.diag(c).copy()
    off = c - np.diag(diagonal)
    if np.max(np.abs(off)) > tol:
        return MembershipResult(False, None)
    group_values = spectrum.group_means(diagonal)
    spread = np.max(np.abs(diagonal - spectrum.expand(group_values)))
    if spread > tol:
        return MembershipResult(False, None)
    witness = lagrange_interpolate(spectrum.representatives, group_values)
    return MembershipResult(True, witness)

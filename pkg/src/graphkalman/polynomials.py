"""Real polynomials in one variable, stored as ascending coefficient tuples."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly


def _trim(coeffs: Sequence[float]) -> tuple[float, ...]:
    # canonical form: drop exact trailing zeros, keep at least the constant term
    out = [float(c) for c in coeffs]
    while len(out) > 1 and out[-1] == 0.0:
        out.pop()
    if not out:
        out = [0.0]
    return tuple(out)


@dataclass(frozen=True)
class Polynomial:
    """h(t) = coeffs[0] + coeffs[1]*t + ... + coeffs[L]*t^L."""

    coeffs: tuple[float, ...] = (0.0,)

    def __post_init__(self) -> None:
        trimmed = _trim(self.coeffs)
        if not all(np.isfinite(c) for c in trimmed):
            raise ValueError(f"non-finite coefficient in {trimmed!r}")
        object.__setattr__(self, "coeffs", trimmed)

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls((0.0,))

    @classmethod
    def one(cls) -> "Polynomial":
        return cls((1.0,))

    @classmethod
    def constant(cls, value: float) -> "Polynomial":
        return cls((float(value),))

    @classmethod
    def identity(cls) -> "Polynomial":
        """The polynomial h(t) = t."""
        return cls((0.0, 1.0))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    def __call__(self, t):
        return npoly.polyval(t, self.coeffs)

    def __add__(self, other) -> "Polynomial":
        other = _coerce(other)
        return Polynomial(tuple(npoly.polyadd(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "Polynomial":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "Polynomial":
        other = _coerce(other)
        return Polynomial(tuple(npoly.polymul(self.coeffs, other.coeffs)))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, (int, np.integer)) or exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")
        return Polynomial(tuple(npoly.polypow(self.coeffs, int(exponent))))

    def __mod__(self, modulus: "Polynomial") -> "Polynomial":
        return reduce_mod_minimal(self, modulus)

    def to_list(self) -> list[float]:
        return list(self.coeffs)

    @staticmethod
    def from_coeffs(coeffs: Iterable[float]) -> "Polynomial":
        return Polynomial(tuple(float(c) for c in coeffs))


def _coerce(value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (int, float, np.integer, np.floating)):
        return Polynomial.constant(float(value))
    raise TypeError(f"cannot treat {value!r} as a polynomial")


def reduce_mod_minimal(poly: Polynomial, modulus: Polynomial) -> Polynomial:
    """Remainder of ``poly`` under division by ``modulus`` (degree strictly reduced)."""
    if modulus.is_zero:
        raise ValueError("cannot reduce modulo the zero polynomial")
    if modulus.degree < 1:
        raise ValueError("modulus must have degree >= 1")
    if poly.degree < modulus.degree:
        return poly
    _, rem = npoly.polydiv(poly.coeffs, modulus.coeffs)
    return Polynomial(tuple(rem))


@lru_cache(maxsize=128)
def _interpolation_operator(node_bytes: bytes, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Monomial coefficients of the Lagrange basis at the given nodes.

    The map values -> coefficients is linear; its matrix is computed in
    exact rational arithmetic (floats are dyadic rationals) because the
    monomial basis is ill-conditioned enough that an all-double build
    loses several digits at the nodes.  Returned as a double-double pair
    (hi, lo) with hi + lo the correctly rounded entries.
    """
    nodes = np.frombuffer(node_bytes, dtype=float).reshape(count)
    roots = [Fraction(v) for v in nodes]
    d = len(roots)
    node_poly = [Fraction(1)]
    for r in roots:
        # multiply by (t - r)
        extended = [Fraction(0)] * (len(node_poly) + 1)
        for i, c in enumerate(node_poly):
            extended[i + 1] += c
            extended[i] -= r * c
        node_poly = extended
    hi = np.empty((d, d))
    lo = np.empty((d, d))
    for j, r in enumerate(roots):
        # synthetic division of the node polynomial by (t - r)
        quotient = [Fraction(0)] * d
        quotient[d - 1] = node_poly[d]
        for i in range(d - 1, 0, -1):
            quotient[i - 1] = node_poly[i] + r * quotient[i]
        weight = Fraction(1)
        for k, other in enumerate(roots):
            if k != j:
                weight *= r - other
        for i in range(d):
            exact = quotient[i] / weight
            hi[i, j] = float(exact)
            lo[i, j] = float(exact - Fraction(hi[i, j]))
    return hi, lo


def _two_prod(a: np.ndarray, b: float) -> tuple[np.ndarray, np.ndarray]:
    # Dekker splitting; exact product error without FMA
    product = a * b
    splitter = 134217729.0  # 2**27 + 1
    a_big = splitter * a
    a_hi = a_big - (a_big - a)
    a_lo = a - a_hi
    b_big = splitter * b
    b_hi = b_big - (b_big - b)
    b_lo = b - b_hi
    err = ((a_hi * b_hi - product) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return product, err


def _two_sum(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    total = a + b
    b_virtual = total - a
    err = (a - (total - b_virtual)) + (b - b_virtual)
    return total, err


def lagrange_interpolate(nodes, values) -> Polynomial:
    """Interpolating polynomial of degree < d through ``(nodes[j], values[j])``.

    Applies the exact Lagrange-basis operator (barycentric weights and node
    polynomial deflation) with compensated accumulation, so the returned
    monomial coefficients reproduce the node values to near the float64
    representation floor.

    Raises:
        ValueError: if two nodes coincide.
    """
    x = np.atleast_1d(np.asarray(nodes, dtype=float))
    y = np.atleast_1d(np.asarray(values, dtype=float))
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError("nodes and values must be one-dimensional and equal length")
    d = x.size
    if d == 0:
        raise ValueError("need at least one interpolation node")
    if d == 1:
        return Polynomial.constant(y[0])
    diff = x[:, None] - x[None, :]
    if np.any(diff[~np.eye(d, dtype=bool)] == 0.0):
        raise ValueError("interpolation nodes must be pairwise distinct")

    hi, lo = _interpolation_operator(x.tobytes(), d)
    acc = np.zeros(d)
    comp = np.zeros(d)
    for j in range(d):
        product, prod_err = _two_prod(hi[:, j], float(y[j]))
        acc, sum_err = _two_sum(acc, product)
        comp += prod_err + sum_err + lo[:, j] * y[j]
    return Polynomial(tuple(acc + comp))

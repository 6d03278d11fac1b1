"""Graph Kalman filter in spectral and matrix form.

The gain and error covariance stay polynomials of the graph shift, so each
step reduces to independent scalar updates at the distinct eigenvalues:

    predicted  pe = a^2 p_prev + sigma^2
    gain       gamma = pe * b / (b^2 pe + sigma_tilde^2)
    updated    pi = sigma_tilde^2 * pe / (b^2 pe + sigma_tilde^2)

The dense matrix Riccati recursion is kept as a cross-checking path.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .dynamics import DynamicalSystem
from .errors import (
    NotPositiveSemidefiniteError,
    NumericalFailureError,
    SingularGainError,
)
from .filters import apply_filter, eval_filter
from .polynomials import Polynomial, lagrange_interpolate, reduce_mod_minimal
from .spectral import DistinctSpectrum

DUAL_FORM_TOL = 1e-9
INNOVATION_CONDITION_LIMIT = 1e14


@dataclass(frozen=True, eq=False)
class KalmanState:
    """Estimate and error covariance after step k (gain is None at k=0)."""

    step: int
    estimate: np.ndarray
    error_poly: Polynomial
    gain_poly: Polynomial | None
    error_matrix: np.ndarray | None = None
    gain_matrix: np.ndarray | None = None


def predict(sys: DynamicalSystem, xhat_prev: np.ndarray, k: int) -> np.ndarray:
    """Prediction step: a_k(S) applied to the previous estimate."""
    return apply_filter(sys.state_poly(k), sys.shift, xhat_prev)


def update(
    sys: DynamicalSystem,
    xhat_pred: np.ndarray,
    z: np.ndarray,
    gain: Polynomial,
    k: int,
) -> np.ndarray:
    """Gain step: correct the prediction by the filtered innovation."""
    innovation = z - apply_filter(sys.observation_poly(k), sys.shift, xhat_pred)
    return xhat_pred + apply_filter(gain, sys.shift, innovation)


def _scalar_riccati(
    p_values: np.ndarray,
    a_values: np.ndarray,
    b_values: np.ndarray,
    sigma: float,
    sigma_tilde: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-eigenvalue gain and updated error variance."""
    predicted = a_values**2 * p_values + sigma**2
    if sigma_tilde > 0:
        denom = b_values**2 * predicted + sigma_tilde**2
        return predicted * b_values / denom, sigma_tilde**2 * predicted / denom
    blind = b_values == 0.0
    if np.any(blind & (predicted > 0.0)):
        raise SingularGainError(
            "zero observation noise with a vanishing observation response at an uncertain frequency"
        )
    safe = np.where(blind, 1.0, b_values)
    gains = np.where(blind, 0.0, 1.0 / safe)
    return gains, np.zeros_like(predicted)


def spectral_gain(
    p_prev: Polynomial,
    state_poly: Polynomial,
    observation_poly: Polynomial,
    sigma: float,
    sigma_tilde: float,
    spectrum: DistinctSpectrum,
) -> Polynomial:
    """Gain polynomial interpolated from the per-eigenvalue scalar gains."""
    mu = spectrum.representatives
    gains, _ = _scalar_riccati(
        np.atleast_1d(p_prev(mu)),
        np.atleast_1d(state_poly(mu)),
        np.atleast_1d(observation_poly(mu)),
        sigma,
        sigma_tilde,
    )
    return lagrange_interpolate(mu, gains)


def spectral_error_update(
    p_prev: Polynomial,
    state_poly: Polynomial,
    observation_poly: Polynomial,
    sigma: float,
    sigma_tilde: float,
    spectrum: DistinctSpectrum,
) -> Polynomial:
    """Updated error covariance polynomial interpolated from scalar updates."""
    mu = spectrum.representatives
    _, errors = _scalar_riccati(
        np.atleast_1d(p_prev(mu)),
        np.atleast_1d(state_poly(mu)),
        np.atleast_1d(observation_poly(mu)),
        sigma,
        sigma_tilde,
    )
    return lagrange_interpolate(mu, errors)


def _as_matrix(operand) -> np.ndarray:
    return np.asarray(getattr(operand, "matrix", operand), dtype=float)


def _predicted_covariance(p_prev: np.ndarray, a: np.ndarray, sigma: float) -> np.ndarray:
    predicted = a @ p_prev @ a.T + sigma**2 * np.eye(a.shape[0])
    return 0.5 * (predicted + predicted.T)


def _innovation_solve(predicted: np.ndarray, b: np.ndarray, sigma_tilde: float) -> np.ndarray:
    innovation = b @ predicted @ b.T + sigma_tilde**2 * np.eye(b.shape[0])
    innovation = 0.5 * (innovation + innovation.T)
    eigenvalues = np.linalg.eigvalsh(innovation)
    if eigenvalues[0] <= 0 or eigenvalues[-1] / eigenvalues[0] > INNOVATION_CONDITION_LIMIT:
        raise NumericalFailureError(
            f"innovation matrix numerically singular (condition beyond {INNOVATION_CONDITION_LIMIT:g})"
        )
    factor = scipy.linalg.cho_factor(innovation)
    return scipy.linalg.cho_solve(factor, b @ predicted).T


def matrix_gain(p_prev, state_matrix, observation_matrix, sigma: float, sigma_tilde: float) -> np.ndarray:
    """Dense Kalman gain via a symmetric positive-definite solve."""
    p = _as_matrix(p_prev)
    a = _as_matrix(state_matrix)
    b = _as_matrix(observation_matrix)
    predicted = _predicted_covariance(p, a, sigma)
    return _innovation_solve(predicted, b, sigma_tilde)


def matrix_error_update(
    p_prev,
    state_matrix,
    observation_matrix,
    sigma: float,
    sigma_tilde: float,
    gain: np.ndarray | None = None,
) -> np.ndarray:
    """Dense error covariance update P = (I - K B)(A P A^T + sigma^2 I)."""
    p = _as_matrix(p_prev)
    a = _as_matrix(state_matrix)
    b = _as_matrix(observation_matrix)
    predicted = _predicted_covariance(p, a, sigma)
    if gain is None:
        gain = _innovation_solve(predicted, b, sigma_tilde)
    updated = (np.eye(a.shape[0]) - gain @ b) @ predicted
    return 0.5 * (updated + updated.T)


@dataclass(frozen=True, eq=False)
class RiccatiSequence:
    """Gain and error polynomials for steps 1..m (p_0 included, reduced)."""

    initial_error: Polynomial
    gains: tuple[Polynomial, ...]
    error_polys: tuple[Polynomial, ...]
    gain_matrices: tuple[np.ndarray, ...] | None = None
    error_matrices: tuple[np.ndarray, ...] | None = None


def _validate_initial_error(p0: Polynomial, spectrum: DistinctSpectrum) -> np.ndarray:
    values = np.atleast_1d(p0(spectrum.representatives))
    tol = 1e-10 * max(float(np.max(values)), 0.0)
    if np.min(values) < -tol:
        raise NotPositiveSemidefiniteError(
            f"initial error covariance has negative frequency variance {float(np.min(values)):g}"
        )
    return values


def riccati_sequence(
    sys: DynamicalSystem,
    p0: Polynomial | None = None,
    steps: int | None = None,
    matrix_check: bool = False,
) -> RiccatiSequence:
    """Run the error/gain recursion for ``steps`` steps (default: the horizon).

    The recursion is carried on the per-eigenvalue values; the returned
    polynomials interpolate them at the distinct eigenvalues.  With
    ``matrix_check`` the dense Riccati recursion runs alongside and any
    disagreement beyond the dual-form tolerance raises.
    """
    if p0 is None:
        p0 = sys.initial_covariance
    if steps is None:
        steps = sys.horizon
    if not 0 <= steps <= sys.horizon:
        raise ValueError(f"steps {steps} out of range 0..{sys.horizon}")
    mu = sys.spectrum.representatives
    p_values = _validate_initial_error(p0, sys.spectrum)
    p0_reduced = reduce_mod_minimal(p0, sys.minimal_poly)

    gains: list[Polynomial] = []
    errors: list[Polynomial] = []
    gain_matrices: list[np.ndarray] = []
    error_matrices: list[np.ndarray] = []
    p_matrix = eval_filter(p0_reduced, sys.decomposition).matrix if matrix_check else None

    for k in range(1, steps + 1):
        a = sys.state_poly(k)
        b = sys.observation_poly(k)
        sigma = sys.state_sigma(k)
        sigma_tilde = sys.observation_sigma(k)
        try:
            gain_values, error_values = _scalar_riccati(
                p_values,
                np.atleast_1d(a(mu)),
                np.atleast_1d(b(mu)),
                sigma,
                sigma_tilde,
            )
        except SingularGainError as exc:
            raise SingularGainError(f"step {k}: {exc}") from exc
        gain_poly = lagrange_interpolate(mu, gain_values)
        error_poly = lagrange_interpolate(mu, error_values)
        gains.append(gain_poly)
        errors.append(error_poly)

        if matrix_check:
            a_mat = eval_filter(a, sys.decomposition).matrix
            b_mat = eval_filter(b, sys.decomposition).matrix
            try:
                k_mat = matrix_gain(p_matrix, a_mat, b_mat, sigma, sigma_tilde)
                p_matrix = matrix_error_update(p_matrix, a_mat, b_mat, sigma, sigma_tilde, gain=k_mat)
            except NumericalFailureError as exc:
                raise NumericalFailureError(f"step {k}: {exc}") from exc
            gain_matrices.append(k_mat)
            error_matrices.append(p_matrix)
            for label, poly, dense in (("gain", gain_poly, k_mat), ("error covariance", error_poly, p_matrix)):
                spectral_mat = eval_filter(poly, sys.decomposition).matrix
                gap = np.linalg.norm(spectral_mat - dense) / max(1.0, np.linalg.norm(dense))
                if gap > DUAL_FORM_TOL:
                    raise NumericalFailureError(
                        f"step {k}: spectral and matrix {label} disagree (relative gap {gap:.3e})"
                    )

        p_values = error_values

    return RiccatiSequence(
        initial_error=p0_reduced,
        gains=tuple(gains),
        error_polys=tuple(errors),
        gain_matrices=tuple(gain_matrices) if matrix_check else None,
        error_matrices=tuple(error_matrices) if matrix_check else None,
    )


def run_filter(
    sys: DynamicalSystem,
    observations,
    xhat0: np.ndarray | None = None,
    p0: Polynomial | None = None,
    matrix_check: bool = False,
    riccati: RiccatiSequence | None = None,
) -> list[KalmanState]:
    """Filter a full observation sequence; returns states for k = 0..M.

    Defaults follow the stationary initialization: zero initial estimate
    with the system's initial covariance as p_0.  A precomputed
    ``riccati`` sequence (which is data-independent) may be reused across
    trajectories.
    """
    obs = np.asarray(observations, dtype=float)
    if obs.ndim == 1:
        obs = obs.reshape(0, sys.n) if obs.size == 0 else obs.reshape(1, -1)
    if obs.size and obs.shape[1] != sys.n:
        raise ValueError(f"observations have {obs.shape[1]} entries per step, expected {sys.n}")
    m = obs.shape[0]
    if m > sys.horizon:
        raise ValueError(f"{m} observations exceed the system horizon {sys.horizon}")
    if p0 is None:
        p0 = sys.initial_covariance
    if riccati is None:
        riccati = riccati_sequence(sys, p0=p0, steps=m, matrix_check=matrix_check)
    elif len(riccati.gains) < m:
        raise ValueError("precomputed riccati sequence is shorter than the observations")

    xhat = np.zeros(sys.n) if xhat0 is None else np.asarray(xhat0, dtype=float)
    initial_matrix = (
        eval_filter(riccati.initial_error, sys.decomposition).matrix
        if riccati.error_matrices is not None
        else None
    )
    states = [
        KalmanState(
            step=0,
            estimate=xhat,
            error_poly=riccati.initial_error,
            gain_poly=None,
            error_matrix=initial_matrix,
        )
    ]
    for k in range(1, m + 1):
        predicted = predict(sys, xhat, k)
        xhat = update(sys, predicted, obs[k - 1], riccati.gains[k - 1], k)
        states.append(
            KalmanState(
                step=k,
                estimate=xhat,
                error_poly=riccati.error_polys[k - 1],
                gain_poly=riccati.gains[k - 1],
                error_matrix=None if riccati.error_matrices is None else riccati.error_matrices[k - 1],
                gain_matrix=None if riccati.gain_matrices is None else riccati.gain_matrices[k - 1],
            )
        )
    return states


def filter_spectrum_to_csv(states: list[KalmanState], decomposition, target) -> None:
    """Write rows (k, eigenindex, lambda, p_k, g_k); k=0 rows carry no gain."""
    lam = decomposition.eigenvalues
    lines = ["k,eigenindex,lambda,p,g"]
    for state in states:
        p_values = np.atleast_1d(state.error_poly(lam))
        g_values = None if state.gain_poly is None else np.atleast_1d(state.gain_poly(lam))
        for idx in range(lam.size):
            g_text = "" if g_values is None else repr(float(g_values[idx]))
            lines.append(
                f"{state.step},{idx + 1},{lam[idx]!r},{float(p_values[idx])!r},{g_text}"
            )
    text = "\n".join(lines) + "\n"
    if isinstance(target, (str, Path)):
        Path(target).write_text(text)
    else:
        target.write(text)


def filter_estimates_to_csv(states: list[KalmanState], target) -> None:
    """Write rows (k, vertex, xhat)."""
    lines = ["k,vertex,xhat"]
    for state in states:
        for vertex in range(1, state.estimate.size + 1):
            lines.append(f"{state.step},{vertex},{float(state.estimate[vertex - 1])!r}")
    text = "\n".join(lines) + "\n"
    if isinstance(target, (str, Path)):
        Path(target).write_text(text)
    else:
        target.write(text)

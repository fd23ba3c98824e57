"""Stochastic pointer models for weak and strong measurement.

The weak pointer model: each trial draws an eigenvalue of the observable
with its Born probability and adds Gaussian pointer noise of width delta_w.
The sample mean is then an unbiased estimate of tr(rho A), with per-trial
variance delta_w^2 + Var_rho(A) -- dominated by the pointer noise, which is
why the resulting error boxes are nearly state-independent.

Weak values (post-selected first moments) are generally complex; their real
and imaginary parts are read out from disjoint sub-ensembles, so the
simulated estimate carries independent Gaussian noise per component with
spread delta_w / sqrt(n * p_b), where p_b is the post-selection probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NonHermitianObservable,
    PostSelectionImpossible,
)
from .linalg import DensityMatrix, PureState, as_matrix, hermitian_eig, is_hermitian
from .rng import spawn_rng

POST_SELECTION_FLOOR = 1e-8


@dataclass(frozen=True)
class NoiseModel:
    """Pointer spread, ensemble size, and the seed driving the simulation."""

    delta_w: float
    ensemble_size: int
    seed: int

    def __post_init__(self):
        if not self.delta_w > 0:
            raise ValueError(f"delta_w must be positive, got {self.delta_w}")
        if self.ensemble_size < 1:
            raise ValueError(f"ensemble_size must be >= 1, got {self.ensemble_size}")


@dataclass(frozen=True)
class MeasurementRecord:
    """Estimate with its standard error and bookkeeping."""

    estimate: complex
    std_error: float
    raw_mean_count: int
    truth_hint: complex | None = None

    @property
    def sample_variance(self) -> float:
        """Per-trial sample variance implied by the standard error."""
        return self.std_error**2 * self.raw_mean_count


def _born_sample(rho: DensityMatrix, observable: np.ndarray, n: int, rng) -> np.ndarray:
    """n eigenvalue draws with Born probabilities <v_k|rho|v_k>."""
    eig = hermitian_eig(observable)
    probs = np.array(
        [max(float(np.real(v.amplitudes.conj() @ rho.matrix @ v.amplitudes)), 0.0)
         for v in eig.eigenvectors]
    )
    probs = probs / probs.sum()
    cum = np.cumsum(probs)
    cum[-1] = 1.0
    idx = np.searchsorted(cum, rng.random(n), side="right")
    return eig.eigenvalues[idx]


def _finish_record(readings: np.ndarray, truth: complex) -> MeasurementRecord:
    n = readings.shape[0]
    estimate = float(readings.mean())
    std = float(readings.std(ddof=1)) if n > 1 else 0.0
    return MeasurementRecord(
        estimate=estimate,
        std_error=std / np.sqrt(n),
        raw_mean_count=n,
        truth_hint=truth,
    )


def _check_observable(rho: DensityMatrix, observable: np.ndarray) -> np.ndarray:
    op = as_matrix(observable)
    if op.shape != (rho.dim, rho.dim):
        raise DimensionMismatch(f"observable shape {op.shape} vs state dim {rho.dim}")
    if not is_hermitian(op, tol=1e-10):
        raise NonHermitianObservable("observable must be Hermitian within 1e-10")
    return op


def weak_expectation(rho: DensityMatrix, observable, noise: NoiseModel) -> MeasurementRecord:
    """Weakly measured expectation value of a Hermitian observable.

    Each of the n trials reads eigenvalue + Gaussian(0, delta_w); the record
    holds the sample mean and sample-std/sqrt(n).
    """
    op = _check_observable(rho, observable)
    rng = spawn_rng(noise.seed)
    n = noise.ensemble_size
    readings = _born_sample(rho, op, n, rng) + noise.delta_w * rng.standard_normal(n)
    return _finish_record(readings, truth=float(np.real(rho.expectation(op))))


def strong_expectation(
    rho: DensityMatrix, observable, ensemble_size: int, seed: int
) -> MeasurementRecord:
    """Projective measurement: pure Born sampling, no pointer noise."""
    op = _check_observable(rho, observable)
    if ensemble_size < 1:
        raise ValueError(f"ensemble_size must be >= 1, got {ensemble_size}")
    rng = spawn_rng(seed)
    readings = _born_sample(rho, op, ensemble_size, rng)
    return _finish_record(readings, truth=float(np.real(rho.expectation(op))))


def exact_weak_value(rho: DensityMatrix, operator, post: PureState) -> complex:
    """tr(rho P_b S) / tr(rho P_b) for post-selection state b.

    Raises PostSelectionImpossible when the post-selection probability is
    numerically zero.
    """
    op = as_matrix(operator)
    if op.shape != (rho.dim, rho.dim) or post.dim != rho.dim:
        raise DimensionMismatch("state, operator and post-selection dims must agree")
    b = post.amplitudes
    p_b = float(np.real(b.conj() @ rho.matrix @ b))
    if p_b <= POST_SELECTION_FLOOR:
        raise PostSelectionImpossible(
            f"post-selection probability {p_b:.3e} at or below {POST_SELECTION_FLOOR:.0e}"
        )
    numerator = complex(b.conj() @ op @ rho.matrix @ b)
    return numerator / p_b


def weak_value_estimate(
    rho: DensityMatrix, operator, post: PureState, noise: NoiseModel
) -> MeasurementRecord:
    """Simulated weak-value measurement with post-selection.

    The exact weak value is blurred by independent Gaussian noise on the
    real and imaginary parts, each with spread delta_w / sqrt(n * p_b): only
    the post-selected fraction p_b of the n trials contributes, and the two
    components come from disjoint sub-ensembles.
    """
    value = exact_weak_value(rho, operator, post)
    b = post.amplitudes
    p_b = float(np.real(b.conj() @ rho.matrix @ b))
    sigma = noise.delta_w / np.sqrt(noise.ensemble_size * p_b)
    rng = spawn_rng(noise.seed)
    estimate = value + sigma * rng.standard_normal() + 1j * sigma * rng.standard_normal()
    return MeasurementRecord(
        estimate=complex(estimate),
        std_error=float(sigma),
        raw_mean_count=noise.ensemble_size,
        truth_hint=value,
    )

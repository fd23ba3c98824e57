"""Direct mixed-state tomography from weak measurements of the joint
operators O_ij = P_i P_b P_j (Lundeen-Bamber scheme).

Given the eigenbasis {|a_i>} of one observable and a known probe state |b>
with overlaps c_i = <b|a_i> != 0, the expectations tr(rho O_ij) equal
rho_ji c_i^* c_j entrywise, so dividing out the overlaps reads the density
matrix off directly.  The operators obey O_ij^dag = O_ji and
sum_i O_ii/|c_i|^2 = I, leaving exactly N^2 - 1 independent Hermitian
observables.

The error geometry: with weak-measurement noise delta_w on every data
coordinate, the error box in data space has state-independent volume, and
converting through the metric determinant

    g = d(N)^2 / (prod_i |c_i|^2)^2

gives the error volume  dV = d(N) delta_w^(N^2-1) / prod_i |c_i|^2.
Minimizing over the probe under sum |c_i|^2 = 1 lands on |c_i|^2 = 1/N:
the probe mutually unbiased with respect to the eigenbasis.

Note: g above is the scaling convention the error-volume analysis is built
on; it is not the full real-linear pushforward of the flat metric through
the coordinate change (see lb_jacobian_pushforward_det, which computes that
pushforward exactly -- the two differ by a probe-dependent factor that does
not alter the ratio laws or the optimality point tested here).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, VanishingOverlap
from .linalg import (
    DensityMatrix,
    PureState,
    ReconstructedState,
    build_reconstruction,
    dagger,
    _freeze,
)
from .measurement import NoiseModel, weak_expectation
from .mub import _check_orthonormal
from .operator_basis import FlatMetric
from .rng import derive_seed

OVERLAP_FLOOR = 1e-8


@dataclass(frozen=True, eq=False)
class LBConfiguration:
    """Eigenbasis {|a_i>}, probe |b>, and the derived overlaps c_i = <b|a_i>."""

    a_basis: tuple[PureState, ...]
    b: PureState
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", _freeze(np.asarray(self.c, dtype=complex)))

    @property
    def dim(self) -> int:
        return self.b.dim

    @property
    def overlap_weights(self) -> np.ndarray:
        """|c_i|^2 profile of the probe."""
        return np.abs(self.c) ** 2

    @classmethod
    def build(cls, a_basis: Sequence[PureState], b: PureState) -> "LBConfiguration":
        a_basis = tuple(a_basis)
        dim = b.dim
        if len(a_basis) != dim or any(s.dim != dim for s in a_basis):
            raise DimensionMismatch("eigenbasis must contain exactly dim states of that dim")
        _check_orthonormal(a_basis, tol=1e-12)
        c = np.array([b.overlap(a) for a in a_basis])
        if np.min(np.abs(c)) <= OVERLAP_FLOOR:
            raise VanishingOverlap(
                f"probe overlap magnitude {np.min(np.abs(c)):.3e} at or below {OVERLAP_FLOOR:.0e}"
            )
        total = float(np.sum(np.abs(c) ** 2))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"overlap weights sum to {total!r}, expected 1")
        return cls(a_basis=a_basis, b=b, c=c)


def mub_probe(a_basis: Sequence[PureState]) -> PureState:
    """Probe mutually unbiased to the eigenbasis: the uniform superposition,
    giving |c_i|^2 = 1/N for every i."""
    vec = np.sum([s.amplitudes for s in a_basis], axis=0)
    return PureState.normalized(vec)


def weighted_probe(a_basis: Sequence[PureState], weights) -> PureState:
    """Probe with prescribed overlap profile |c_i|^2 = weights[i]."""
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0):
        raise VanishingOverlap("all probe weights must be positive")
    if abs(w.sum() - 1.0) > 1e-9:
        raise ValueError(f"weights sum to {w.sum()!r}, expected 1")
    vec = np.sum([np.sqrt(wi) * s.amplitudes for wi, s in zip(w, a_basis)], axis=0)
    return PureState.normalized(vec)


def lb_operators(config: LBConfiguration) -> np.ndarray:
    """All N^2 operators O_ij = P_i P_b P_j, shape (N, N, N, N)."""
    n = config.dim
    pb = config.b.projector()
    proj = [s.projector() for s in config.a_basis]
    ops = np.empty((n, n, n, n), dtype=complex)
    for i in range(n):
        left = proj[i] @ pb
        for j in range(n):
            ops[i, j] = left @ proj[j]
    return ops


@dataclass(frozen=True, eq=False)
class LBWeakData:
    """Measured (or exact) expectations w[i, j] = <O_ij>_rho.

    ``std_error`` is the per-real-component standard error of each entry
    when the data came from simulation; None for exact data.
    """

    w: np.ndarray
    std_error: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "w", _freeze(self.w))

    @property
    def dim(self) -> int:
        return self.w.shape[0]


def lb_exact_weak_data(rho: DensityMatrix, config: LBConfiguration) -> LBWeakData:
    """Noise-free data w[i, j] = tr(rho O_ij)."""
    if rho.dim != config.dim:
        raise DimensionMismatch(f"state dim {rho.dim} vs config dim {config.dim}")
    ops = lb_operators(config)
    w = np.einsum("ab,ijba->ij", rho.matrix, ops)
    return LBWeakData(w=w)


def lb_simulated_weak_data(
    rho: DensityMatrix, config: LBConfiguration, noise: NoiseModel
) -> LBWeakData:
    """Weak-measurement simulation of all data entries.

    The off-diagonal O_ij are not Hermitian, so each (i, j) pair with i < j
    is measured through the Hermitian part H = (O_ij + O_ji)/2 and the
    anti-Hermitian part K = (O_ij - O_ji)/(2i), recombined as <H> + i <K>.
    Every entry gets an independent child noise stream derived from the
    root seed, so the full record is reproducible from the NoiseModel alone.
    """
    if rho.dim != config.dim:
        raise DimensionMismatch(f"state dim {rho.dim} vs config dim {config.dim}")
    n = config.dim
    ops = lb_operators(config)
    w = np.zeros((n, n), dtype=complex)
    se = np.zeros((n, n))

    def child(*path: int) -> NoiseModel:
        return NoiseModel(
            delta_w=noise.delta_w,
            ensemble_size=noise.ensemble_size,
            seed=derive_seed(noise.seed, *path),
        )

    for i in range(n):
        rec = weak_expectation(rho, ops[i, i], child(0, i))
        w[i, i] = rec.estimate
        se[i, i] = rec.std_error
    for i in range(n):
        for j in range(i + 1, n):
            herm = (ops[i, j] + ops[j, i]) / 2
            anti = (ops[i, j] - ops[j, i]) / 2j
            rec_h = weak_expectation(rho, herm, child(1, i, j))
            rec_k = weak_expectation(rho, anti, child(2, i, j))
            w[i, j] = rec_h.estimate + 1j * rec_k.estimate
            w[j, i] = np.conj(w[i, j])
            se[i, j] = se[j, i] = max(rec_h.std_error, rec_k.std_error)
    return LBWeakData(w=w, std_error=se)


def lb_reconstruct(data: LBWeakData, config: LBConfiguration) -> ReconstructedState:
    """Invert w[i, j] = rho_ji c_i^* c_j, rotate back to the computational
    basis, Hermitize and renormalize the trace.

    No positivity projection; validity flags fire when the Hermitization
    correction or a negative eigenvalue exceeds the propagated noise scale.
    """
    if data.dim != config.dim:
        raise DimensionMismatch(f"data dim {data.dim} vs config dim {config.dim}")
    c = config.c
    if np.min(np.abs(c)) <= OVERLAP_FLOOR:
        raise VanishingOverlap("configuration has a vanishing overlap")
    scale = np.outer(c.conj(), c)  # scale[i, j] = c_i^* c_j
    rho_a = (data.w / scale).T  # rho_a[j, i] = w[i, j] / (c_i^* c_j)
    basis = np.column_stack([s.amplitudes for s in config.a_basis])
    raw = basis @ rho_a @ dagger(basis)
    if data.std_error is None:
        noise_scale = 0.0
    else:
        noise_scale = float(np.max(data.std_error / np.abs(scale)))
    return build_reconstruction(raw, noise_scale=noise_scale)


# --- error-volume geometry -------------------------------------------------

def lb_metric_det(config: LBConfiguration, flat: FlatMetric) -> float:
    """Metric determinant in weak-data coordinates: d(N)^2 / (prod |c_i|^2)^2."""
    if flat.dim != config.dim:
        raise DimensionMismatch(f"metric dim {flat.dim} vs config dim {config.dim}")
    return metric_det_from_weights(config.overlap_weights, flat)


def metric_det_from_weights(weights, flat: FlatMetric) -> float:
    w = np.asarray(weights, dtype=float)
    if np.any(w <= OVERLAP_FLOOR**2):
        raise VanishingOverlap("overlap weight too small for the metric determinant")
    prod = float(np.prod(w))
    return flat.det_sqrt**2 / prod**2


def lb_error_volume(config: LBConfiguration, delta_w: float, flat: FlatMetric) -> float:
    """Error-box volume d(N) * delta_w^(N^2-1) / prod_i |c_i|^2."""
    if flat.dim != config.dim:
        raise DimensionMismatch(f"metric dim {flat.dim} vs config dim {config.dim}")
    return error_volume_from_weights(config.overlap_weights, delta_w, flat)


def error_volume_from_weights(weights, delta_w: float, flat: FlatMetric) -> float:
    if delta_w <= 0:
        raise ValueError(f"delta_w must be positive, got {delta_w}")
    w = np.asarray(weights, dtype=float)
    if np.any(w <= OVERLAP_FLOOR**2):
        raise VanishingOverlap("overlap weight too small for the error volume")
    n_coords = flat.size
    return float(flat.det_sqrt * delta_w**n_coords / np.prod(w))


def lb_weak_coordinates(data: LBWeakData) -> np.ndarray:
    """The N^2 - 1 independent real data coordinates: the first N-1 diagonal
    entries, then Re/Im of each upper off-diagonal entry."""
    n = data.dim
    out = np.empty(n * n - 1)
    out[: n - 1] = np.diag(data.w).real[: n - 1]
    k = n - 1
    for i in range(n):
        for j in range(i + 1, n):
            out[k] = data.w[i, j].real
            out[k + 1] = data.w[i, j].imag
            k += 2
    return out


def empirical_error_volume(
    w_samples: np.ndarray, config: LBConfiguration, flat: FlatMetric
) -> float:
    """Volume of the scatter of repeated data records: sqrt(det cov) of the
    independent data coordinates, converted to state space through the
    metric determinant."""
    samples = np.asarray(w_samples, dtype=float)
    if samples.ndim != 2 or samples.shape[0] < 2:
        raise ValueError("need at least two data records to estimate a covariance")
    cov = np.cov(samples, rowvar=False)
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        raise ValueError("covariance of data records is singular")
    return float(np.exp(0.5 * logdet) * np.sqrt(lb_metric_det(config, flat)))


def lb_coordinate_jacobian(config: LBConfiguration, flat: FlatMetric) -> np.ndarray:
    """Real-linear Jacobian of the map from state coordinates (flat-metric
    convention) to the independent weak-data coordinates.

    Column a is the data-coordinate image of the a-th coordinate basis
    displacement.  The map is linear, so this is exact.
    """
    n = config.dim
    size = flat.size
    basis = np.column_stack([s.amplitudes for s in config.a_basis])
    scale = np.outer(config.c.conj(), config.c)
    jac = np.empty((size, size))
    for a in range(size):
        unit = np.zeros(size)
        unit[a] = 1.0
        disp = flat.matrix(unit, trace=0.0)
        disp_a = dagger(basis) @ disp @ basis  # <a_i| d_rho |a_j>
        w = disp_a.T * scale  # w[i, j] = <a_j|d_rho|a_i> c_i^* c_j
        jac[:, a] = lb_weak_coordinates(LBWeakData(w=w))
    return jac


def lb_jacobian_pushforward_det(config: LBConfiguration, flat: FlatMetric) -> float:
    """Exact determinant of the flat metric pushed forward to weak-data
    coordinates: det(gram) / (det J)^2 with J the real-linear Jacobian.

    The rigorous counterpart of metric_det_from_weights.  With P = prod
    |c_i|^2, |det J| = (P / |c_N|^2) * P^(N-1), so the two determinants
    differ by the probe-dependent factor (|c_N|^2 / P^(N-1))^2; the factor
    is benign for the ratio laws and the optimality point (see tests).
    """
    jac = lb_coordinate_jacobian(config, flat)
    sign, logdet_j = np.linalg.slogdet(jac)
    if sign == 0:
        raise ValueError("coordinate Jacobian is singular")
    sign_g, logdet_g = np.linalg.slogdet(flat.gram)
    return float(np.exp(logdet_g - 2 * logdet_j))


# --- probe optimality ------------------------------------------------------

@dataclass(frozen=True)
class OptimalityScan:
    """Result of the deterministic error-volume minimization over probes."""

    dim: int
    weights: tuple[float, ...]
    min_volume: float
    grid_step: float
    evaluations: int
    rounds: int


def lb_optimality_scan(
    dim: int,
    flat: FlatMetric,
    delta_w: float = 1.0,
    points_per_dim: int = 21,
    tol: float = 1e-5,
    weight_floor: float = 1e-6,
    max_rounds: int = 40,
) -> OptimalityScan:
    """Minimize the error volume over probe profiles on the simplex
    sum |c_i|^2 = 1 by deterministic nested grid refinement.

    Refines until the grid step drops below ``tol``; the reported weights
    are then within one step of the true minimizer of the (smooth, convex
    in log) objective.
    """
    if flat.dim != dim:
        raise DimensionMismatch(f"metric dim {flat.dim} vs requested dim {dim}")
    free = dim - 1
    log_d = np.log(flat.det_sqrt) + flat.size * np.log(delta_w)

    def log_volume(free_weights: np.ndarray) -> float:
        last = 1.0 - free_weights.sum()
        if last < weight_floor or np.any(free_weights < weight_floor):
            return np.inf
        return log_d - float(np.sum(np.log(free_weights))) - np.log(last)

    lo = np.full(free, weight_floor)
    hi = np.full(free, 1.0 - weight_floor)
    evaluations = 0
    best_point = None
    best_value = np.inf
    step = 0.0
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        axes = [np.linspace(lo[k], hi[k], points_per_dim) for k in range(free)]
        step = float(max((hi[k] - lo[k]) / (points_per_dim - 1) for k in range(free)))
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, free)
        for point in mesh:
            value = log_volume(point)
            evaluations += 1
            if value < best_value:
                best_value = value
                best_point = point.copy()
        if step <= tol:
            break
        span = 2 * step
        lo = np.maximum(best_point - span, weight_floor)
        hi = np.minimum(best_point + span, 1.0 - weight_floor)
    weights = np.append(best_point, 1.0 - best_point.sum())
    return OptimalityScan(
        dim=dim,
        weights=tuple(float(v) for v in weights),
        min_volume=float(np.exp(best_value)),
        grid_step=step,
        evaluations=evaluations,
        rounds=rounds,
    )

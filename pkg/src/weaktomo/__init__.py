"""weaktomo: mixed-state quantum tomography with weak measurements.

The library simulates and analyzes three reconstruction schemes on
N-dimensional mixed states:

- standard tomography from expectation values of a traceless Hermitian
  operator basis (optionally measured weakly),
- the direct scheme built on the joint operators P_i P_b P_j of a single
  eigenbasis and one probe state (Lundeen-Bamber),
- weak-value tomography from eigenprojector weak values over several
  post-selections (Wu),

together with the flat state-space metric, the error-volume geometry that
singles out mutually unbiased measurement design, and the prime-dimension
MUB construction itself.
"""

from .errors import (
    ConfigError,
    DimensionMismatch,
    DivisorUnderflow,
    IncompletePostSelectionFamily,
    InconsistentRatios,
    InvalidDimension,
    InvalidRank,
    NonHermitianInput,
    NonHermitianObservable,
    NotOrthonormal,
    NotPrime,
    PostSelectionImpossible,
    ShapeMismatch,
    VanishingOverlap,
    WeaktomoError,
)
from .linalg import (
    DensityMatrix,
    EigenDecomposition,
    PureState,
    ReconstructedState,
    build_reconstruction,
    frobenius_inner,
    hermitian_eig,
    max_abs,
    random_density,
    random_pure_state,
    random_unitary,
    validate_density_matrix,
)
from .lundeen_bamber import (
    LBConfiguration,
    LBWeakData,
    OptimalityScan,
    empirical_error_volume,
    error_volume_from_weights,
    lb_coordinate_jacobian,
    lb_error_volume,
    lb_exact_weak_data,
    lb_jacobian_pushforward_det,
    lb_metric_det,
    lb_operators,
    lb_optimality_scan,
    lb_reconstruct,
    lb_simulated_weak_data,
    lb_weak_coordinates,
    metric_det_from_weights,
    mub_probe,
    weighted_probe,
)
from .measurement import (
    MeasurementRecord,
    NoiseModel,
    exact_weak_value,
    strong_expectation,
    weak_expectation,
    weak_value_estimate,
)
from .mub import (
    BasisFamily,
    computational_basis,
    family_max_deviation,
    fourier_basis,
    is_prime,
    mub_prime,
    unbiasedness_deviation,
)
from .operator_basis import (
    BlochCoordinates,
    FlatMetric,
    OperatorBasis,
    bloch_decompose,
    flat_metric,
    gell_mann_basis,
    standard_reconstruct,
)
from .rng import derive_seed, spawn_rng
from .wu import (
    WuConfiguration,
    WuFeasibility,
    WuWeakData,
    recover_probabilities,
    wu_exact_data,
    wu_feasibility,
    wu_p_free_reconstruct,
    wu_reconstruct_in_a,
    wu_reconstruct_in_b,
    wu_simulated_data,
)

__version__ = "0.1.0"

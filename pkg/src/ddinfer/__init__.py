"""Data-driven inference of dihedrally covariant qubit channels.

A channel is reconstructed from binary input/output correlations by
choosing the channel whose set of compatible correlations has minimal area
while still containing the data.  Linear-inversion tomography on the same
data is provided for comparison.
"""

from .compat_set import (
    CompatibleSet,
    Kind,
    Regime,
    build,
    contains,
    indistinguishable,
    lambda_omega,
    mu,
    optimal_decoding,
    optimal_encoding,
    polygon_of,
    regime,
    witness_max_violation,
)
from .correlation import Correlation, XYPoint, from_counts, from_xy, symmetrize, to_xy
from .errors import DDInferError, NoFeasibleChannel, NotCompletelyPositive, ValidationError
from .inference import InferenceConfig, InferenceResult, corroborate, dd_infer, identified_parameters
from .metrics import intersect, polygon_area, symmetric_difference_distance
from .qubit_model import (
    DEPOLARIZER,
    IDENTITY,
    CanonicalChannel,
    QubitChannel,
    amplitude_damping,
    canonicalize,
    choi,
    d1_feasible_interval,
    is_completely_positive,
    pauli_channel,
)
from .tomography import ExperimentRecord, linear_inversion, simulate_experiment, tomographic_reconstruction

__version__ = "0.1.0"

__all__ = [
    "CanonicalChannel",
    "CompatibleSet",
    "Correlation",
    "DDInferError",
    "DEPOLARIZER",
    "ExperimentRecord",
    "IDENTITY",
    "InferenceConfig",
    "InferenceResult",
    "Kind",
    "NoFeasibleChannel",
    "NotCompletelyPositive",
    "QubitChannel",
    "Regime",
    "ValidationError",
    "XYPoint",
    "amplitude_damping",
    "build",
    "canonicalize",
    "choi",
    "contains",
    "corroborate",
    "d1_feasible_interval",
    "dd_infer",
    "from_counts",
    "from_xy",
    "identified_parameters",
    "indistinguishable",
    "intersect",
    "is_completely_positive",
    "lambda_omega",
    "linear_inversion",
    "mu",
    "optimal_decoding",
    "optimal_encoding",
    "pauli_channel",
    "polygon_area",
    "polygon_of",
    "regime",
    "simulate_experiment",
    "symmetric_difference_distance",
    "symmetrize",
    "to_xy",
    "tomographic_reconstruction",
    "witness_max_violation",
]

"""Open-quantum-system toolkit: channels, master equations, trajectory
unravelings, scattering and oscillator decoherence models, protected-subspace
search, and a three-qubit phase-flip code, with a CLI front end.
"""

__version__ = "0.1.0"

from .core import (
    DensityMatrix,
    KET_0,
    KET_1,
    KET_MINUS,
    KET_PLUS,
    Operator,
    PAULIS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    StateVector,
    basis_state,
    embed,
    entropy,
    identity,
    ket,
    mutual_information,
    overlap,
    partial_trace,
    partial_trace_keep_state,
    purity,
    sigma,
    tensor,
)
from .channels import (
    IndirectMeasurement,
    KrausChannel,
    apply_channel,
    dilation_action,
    indirect_measurement,
    kraus_from_unitary,
    measurement_operators,
    verify_completeness,
)
from .dynamics import (
    EvolutionResult,
    LindbladSpec,
    TrajectoryConfig,
    TrajectoryResult,
    evolve,
    unravel,
)
from .baths import (
    CoefficientSet,
    OhmicLorentzCutoff,
    QuadratureConfig,
    SampledSpectralDensity,
    bath_kernels,
    effective_spectral_density,
    qbm_coefficients,
    spin_boson_coefficients,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    GridResolutionError,
    PhysicalityError,
    PositivityError,
)
from .pointer import (
    CollectiveDFSReport,
    DFSResult,
    FragmentCurve,
    InteractionSpec,
    SieveReport,
    collective_dephasing_spec,
    collective_dfs,
    commutativity_residual,
    dfs_find,
    fragment_mutual_information,
    pointer_states,
    predictability_sieve,
)
from .qec import (
    ErrorModel,
    LogicalErrorRow,
    SyndromeOutcome,
    apply_errors,
    code_words,
    decode,
    encode,
    expand_in_pauli_errors,
    logical_error_rate,
    syndrome_and_recover,
)
from . import models

__all__ = [
    "__version__",
    "DensityMatrix",
    "KET_0",
    "KET_1",
    "KET_MINUS",
    "KET_PLUS",
    "Operator",
    "PAULIS",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "StateVector",
    "basis_state",
    "embed",
    "entropy",
    "identity",
    "ket",
    "mutual_information",
    "overlap",
    "partial_trace",
    "partial_trace_keep_state",
    "purity",
    "sigma",
    "tensor",
    "IndirectMeasurement",
    "KrausChannel",
    "apply_channel",
    "dilation_action",
    "indirect_measurement",
    "kraus_from_unitary",
    "measurement_operators",
    "verify_completeness",
    "EvolutionResult",
    "LindbladSpec",
    "TrajectoryConfig",
    "TrajectoryResult",
    "evolve",
    "unravel",
    "CoefficientSet",
    "OhmicLorentzCutoff",
    "QuadratureConfig",
    "SampledSpectralDensity",
    "bath_kernels",
    "effective_spectral_density",
    "qbm_coefficients",
    "spin_boson_coefficients",
    "ConfigError",
    "ConvergenceError",
    "GridResolutionError",
    "PhysicalityError",
    "PositivityError",
    "CollectiveDFSReport",
    "DFSResult",
    "FragmentCurve",
    "InteractionSpec",
    "SieveReport",
    "collective_dephasing_spec",
    "collective_dfs",
    "commutativity_residual",
    "dfs_find",
    "fragment_mutual_information",
    "pointer_states",
    "predictability_sieve",
    "ErrorModel",
    "LogicalErrorRow",
    "SyndromeOutcome",
    "apply_errors",
    "code_words",
    "decode",
    "encode",
    "expand_in_pauli_errors",
    "logical_error_rate",
    "syndrome_and_recover",
    "models",
]

"""Modal dynamics toolkit for finite-dimensional quantum systems.

The package turns density matrices into spectral epistemic states, computes
conditional probabilities between spectral entries across subsystem
partitions and time, samples ontic trajectories under Lindblad dynamics, and
verifies that channels are completely positive and trace preserving.
"""

from .channels import (
    Channel,
    CptReport,
    KrausChannel,
    LindbladGenerator,
    Superoperator,
    apply,
    choi_to_kraus,
    compose,
    completeness_residual,
    evolve,
    identity_channel,
    kraus_to_choi,
    kraus_to_superoperator,
    lindblad_superoperator,
    superoperator_to_choi,
    unitary_channel,
    verify_cpt,
    verify_kraus_operators,
    verify_superoperator_matrix,
)
from .conditional import (
    ConditionalTable,
    Partition,
    conditional_table,
    dynamical_conditional,
    joint_conditional,
    kinematic_conditional,
    trivial_partition,
)
from .errors import (
    CptVerificationError,
    DegenerateBasisError,
    DimensionMismatchError,
    InvalidAmplitudesError,
    InvalidDensityMatrixError,
    LayoutMismatchError,
    ModalDynError,
    NonOrthogonalEntriesError,
    NormalizationError,
    NotHermitianError,
    NotUnitaryError,
    ProbabilityBoundsError,
    UnknownLabelError,
)
from .linalg import (
    SystemLayout,
    canonical_phase,
    hermitian_eig,
    kron,
    kron_all,
    partial_trace,
    trace_distance,
)
from .scenarios import (
    Scenario,
    amplitude_damping_qubit,
    dephasing_qubit,
    epr_bohm,
    ghz_mermin,
    von_neumann_measurement,
)
from .states import (
    DensityMatrix,
    EpistemicState,
    OnticState,
    epistemic_to_density,
    extract_epistemic,
    projector_of,
)
from .trajectories import (
    EnsembleReport,
    StepChain,
    TimeGrid,
    Trajectory,
    build_step_chain,
    run_ensemble,
    sample_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "ConditionalTable",
    "CptReport",
    "CptVerificationError",
    "DegenerateBasisError",
    "DensityMatrix",
    "DimensionMismatchError",
    "EnsembleReport",
    "EpistemicState",
    "InvalidAmplitudesError",
    "InvalidDensityMatrixError",
    "KrausChannel",
    "LayoutMismatchError",
    "LindbladGenerator",
    "ModalDynError",
    "NonOrthogonalEntriesError",
    "NormalizationError",
    "NotHermitianError",
    "NotUnitaryError",
    "OnticState",
    "Partition",
    "ProbabilityBoundsError",
    "Scenario",
    "StepChain",
    "Superoperator",
    "SystemLayout",
    "TimeGrid",
    "Trajectory",
    "UnknownLabelError",
    "amplitude_damping_qubit",
    "apply",
    "build_step_chain",
    "canonical_phase",
    "choi_to_kraus",
    "completeness_residual",
    "compose",
    "conditional_table",
    "dephasing_qubit",
    "dynamical_conditional",
    "epistemic_to_density",
    "epr_bohm",
    "evolve",
    "extract_epistemic",
    "ghz_mermin",
    "hermitian_eig",
    "identity_channel",
    "joint_conditional",
    "kinematic_conditional",
    "kraus_to_choi",
    "kraus_to_superoperator",
    "kron",
    "kron_all",
    "lindblad_superoperator",
    "partial_trace",
    "projector_of",
    "run_ensemble",
    "sample_trajectory",
    "superoperator_to_choi",
    "trace_distance",
    "trivial_partition",
    "unitary_channel",
    "verify_cpt",
    "verify_kraus_operators",
    "verify_superoperator_matrix",
    "von_neumann_measurement",
]

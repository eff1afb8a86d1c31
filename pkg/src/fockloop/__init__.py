"""Conditional quantum-state engineering at two-mode optical couplers.

The package builds the non-unitary operators that conditioning an idler
measurement induces on a signal mode, in an explicitly truncated photon-number
basis, and layers two applications on top: synthesis of arbitrary finite Fock
superpositions by repeated displaced photon adding, and a lossy feedback loop
that walks a circulating pulse up to a photon-number target.  Everything that
truncates reports what it dropped.
"""

from .conditional import (
    ConditionalOperator,
    PolynomialState,
    conditional_operator,
    conditional_transform,
    displaced_conditional,
    oracle_conditional,
    photon_add_operator,
)
from .couplers import (
    AMPLIFIER,
    CONVERTER,
    CouplerAngles,
    CouplerParams,
    displacement_from_pump,
    displacement_transport,
    generator_matrices,
    hamiltonian_oracle,
    heisenberg_matrix,
    inverse_params,
    params_from_angles,
    swap_modes,
    two_mode_unitary,
)
from .errors import (
    CoefficientOverflowError,
    ConfigError,
    DegenerateCouplerError,
    DegenerateTargetError,
    TruncationError,
    TruncationWarning,
    UnreachableThresholdError,
    ZeroMeanError,
    ZeroProbabilityError,
)
from .feedback import (
    FeedbackConfig,
    FockRunResult,
    TraceRecord,
    amplify_and_detect,
    amplify_channel,
    binomial_weight,
    detection_distribution,
    detection_probability,
    detection_schedule,
    loss_channel,
    required_feedback_efficiency,
    round_trip,
    simulate_fock_run,
    steady_state_mean,
    unconditional_mean,
)
from .fock import (
    DensityDiagonal,
    FockVector,
    OperatorMatrix,
    TwoModeOperator,
    displacement_matrix,
    fidelity,
    kerr_phase,
    ladder,
    mandel_q,
    thermal_diagonal,
)
from .linalg import expi_hermitian
from .multiport import (
    ModePartition,
    coupling_matrix,
    metric_deviation,
    random_hermitian,
    two_mode_coupling,
)
from .sorder import (
    NormalPoly,
    normal_poly_to_matrix,
    reorder_monomial,
    s_ordered_bilinear,
)
from .synthesis import (
    QubitDesign,
    SynthesisPlan,
    fock_asymptote,
    fock_probability,
    idler_schedule,
    inverse_schedule,
    optimal_r2,
    plan_synthesis,
    q_function_zeros,
    qubit_design,
    synth_product,
    synthesis_probability,
)

__version__ = "0.1.0"

__all__ = [
    "AMPLIFIER",
    "CONVERTER",
    "CoefficientOverflowError",
    "ConditionalOperator",
    "ConfigError",
    "CouplerAngles",
    "CouplerParams",
    "DegenerateCouplerError",
    "DegenerateTargetError",
    "DensityDiagonal",
    "FeedbackConfig",
    "FockRunResult",
    "FockVector",
    "ModePartition",
    "NormalPoly",
    "OperatorMatrix",
    "PolynomialState",
    "QubitDesign",
    "SynthesisPlan",
    "TraceRecord",
    "TruncationError",
    "TruncationWarning",
    "TwoModeOperator",
    "UnreachableThresholdError",
    "ZeroMeanError",
    "ZeroProbabilityError",
    "amplify_and_detect",
    "amplify_channel",
    "binomial_weight",
    "conditional_operator",
    "conditional_transform",
    "coupling_matrix",
    "detection_distribution",
    "detection_probability",
    "detection_schedule",
    "displaced_conditional",
    "displacement_from_pump",
    "displacement_matrix",
    "displacement_transport",
    "expi_hermitian",
    "fidelity",
    "fock_asymptote",
    "fock_probability",
    "generator_matrices",
    "hamiltonian_oracle",
    "heisenberg_matrix",
    "idler_schedule",
    "inverse_params",
    "inverse_schedule",
    "kerr_phase",
    "ladder",
    "loss_channel",
    "mandel_q",
    "metric_deviation",
    "normal_poly_to_matrix",
    "optimal_r2",
    "oracle_conditional",
    "params_from_angles",
    "photon_add_operator",
    "plan_synthesis",
    "q_function_zeros",
    "qubit_design",
    "random_hermitian",
    "reorder_monomial",
    "required_feedback_efficiency",
    "round_trip",
    "s_ordered_bilinear",
    "simulate_fock_run",
    "steady_state_mean",
    "swap_modes",
    "synth_product",
    "synthesis_probability",
    "thermal_diagonal",
    "two_mode_coupling",
    "two_mode_unitary",
    "unconditional_mean",
]

"""Quantum entropy inequalities and channel-capacity estimates.

Everything works in bits (base-2 logarithms).  Composite systems use the
row-major tensor convention: the leftmost factor is the most significant
index, so subsystem 0 of a (2, 3) signature is the qubit.
"""

from .linalg import (
    ValidationError,
    eigh,
    hermiticity_defect,
    kron,
    partial_trace,
    partial_transpose,
    require_hermitian,
)
from .qstate import (
    DensityOperator,
    Ensemble,
    PureState,
    RngStream,
    basis_state,
    flag_purify,
    make_density,
    maximally_mixed,
    pure_decompositions,
    purify,
    random_density,
    random_ensemble,
    random_probs,
    random_pure,
    random_unitary,
)
from .channel import (
    KrausChannel,
    MeasurePrepareChannel,
    as_kraus,
    choi,
    constant_channel,
    cq_channel,
    dephasing,
    dephasing_mp,
    depolarizing,
    extend_left,
    extend_right,
    identity_channel,
    is_ppt,
    mp_to_kraus,
    qc_channel,
    random_channel,
    random_mp_channel,
    tensor_channels,
)
from .entropy import (
    channel_mutual_information,
    conditional_entropy,
    entropy_of_spectrum,
    relative_entropy,
    von_neumann,
)
from .inequalities import (
    ALL_NAMES,
    CORE_NAMES,
    CheckResult,
    FuzzConfig,
    FuzzReport,
    check_concavity_conditional,
    check_joint_convexity,
    check_monotonicity_cptp,
    check_monotonicity_partial_trace,
    check_purification_decomposition,
    check_strong_concavity,
    check_ssa_II,
    check_ssa_I,
    run_fuzz,
    run_trial,
)
from .capacity import (
    CapacityEstimate,
    OptimizerConfig,
    additivity_probe,
    check_ce_chi_bound,
    check_eb_ce_bound,
    holevo_quantity,
    optimize_ce,
    optimize_chi,
)
from . import serialize

__all__ = [
    "ValidationError",
    "eigh",
    "hermiticity_defect",
    "kron",
    "partial_trace",
    "partial_transpose",
    "require_hermitian",
    "DensityOperator",
    "Ensemble",
    "PureState",
    "RngStream",
    "basis_state",
    "flag_purify",
    "make_density",
    "maximally_mixed",
    "pure_decompositions",
    "purify",
    "random_density",
    "random_ensemble",
    "random_probs",
    "random_pure",
    "random_unitary",
    "KrausChannel",
    "MeasurePrepareChannel",
    "as_kraus",
    "choi",
    "constant_channel",
    "cq_channel",
    "dephasing",
    "dephasing_mp",
    "depolarizing",
    "extend_left",
    "extend_right",
    "identity_channel",
    "is_ppt",
    "mp_to_kraus",
    "qc_channel",
    "random_channel",
    "random_mp_channel",
    "tensor_channels",
    "channel_mutual_information",
    "conditional_entropy",
    "entropy_of_spectrum",
    "relative_entropy",
    "von_neumann",
    "ALL_NAMES",
    "CORE_NAMES",
    "CheckResult",
    "FuzzConfig",
    "FuzzReport",
    "check_concavity_conditional",
    "check_joint_convexity",
    "check_monotonicity_cptp",
    "check_monotonicity_partial_trace",
    "check_purification_decomposition",
    "check_strong_concavity",
    "check_ssa_II",
    "check_ssa_I",
    "run_fuzz",
    "run_trial",
    "CapacityEstimate",
    "OptimizerConfig",
    "additivity_probe",
    "check_ce_chi_bound",
    "check_eb_ce_bound",
    "holevo_quantity",
    "optimize_ce",
    "optimize_chi",
    "serialize",
]

__version__ = "0.1.0"

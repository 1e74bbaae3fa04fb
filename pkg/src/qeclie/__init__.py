"""qeclie: Lie-algebraic analysis of quantum error-correcting codes.

Builds graded error algebras and their Lie closures, checks continuity and
universality conditions, verifies Knill-Laflamme correctability and code
distance for spin codes, synthesizes and certifies logical gate sets,
evaluates dimension-counting bounds, and sweeps Lindblad dephasing noise
with recovery across code families.
"""

__version__ = "0.1.0"

from .operators import (
    Operator,
    OperatorSpan,
    SubsystemLayout,
    embed_local,
    expm_hermitian,
    extend_span,
    hs_inner,
    identity,
    span_intersection,
    span_of,
    spin_ops,
)
from .error_algebra import (
    ClosureReport,
    GradedErrorSet,
    continuity_check,
    graded_span,
    lie_closure,
    pauli_error_set,
    single_site_pauli_set,
    spin_error_set,
    universality_check,
)
from .codes import (
    Code,
    KLReport,
    code_422,
    code_multi_spin_cat,
    code_spin25,
    code_spin_cat,
    code_w_state,
    codespace_projector,
    detection_check,
    distance,
    kl_check,
    load_code,
    save_code,
    tensor_code,
)
from .transversal import (
    TransversalReport,
    certify_transversal,
    induced_logical_action,
    logical_algebra,
    transversal_algebra,
)
from .gates import (
    GateCert,
    cz_gate,
    logical_pauli,
    m_support_sets,
    phase_gate,
    sx_gate,
    synthesize_logical_single_qubit,
    transparency_check,
    verify_logical,
)
from .noise_sim import (
    Channel,
    NoiseModel,
    SimResult,
    entanglement_fidelity,
    jx_dephasing,
    kl_recovery,
    lindblad_channel,
    projector_recovery,
    sweep,
    validate_channel,
)
from .bounds import (
    BoundReport,
    logical_error_estimate,
    min_grade_from_dims,
    singleton_check,
)
from .exceptions import CapabilityError, CodeFileError, SupportOverlapError

__all__ = [
    "__version__",
    "Operator", "OperatorSpan", "SubsystemLayout", "embed_local",
    "expm_hermitian", "extend_span", "hs_inner", "identity",
    "span_intersection", "span_of", "spin_ops",
    "ClosureReport", "GradedErrorSet", "continuity_check", "graded_span",
    "lie_closure", "pauli_error_set", "single_site_pauli_set",
    "spin_error_set", "universality_check",
    "Code", "KLReport", "code_422", "code_multi_spin_cat", "code_spin25",
    "code_spin_cat", "code_w_state", "codespace_projector", "detection_check",
    "distance", "kl_check", "load_code", "save_code", "tensor_code",
    "TransversalReport", "certify_transversal", "induced_logical_action",
    "logical_algebra", "transversal_algebra",
    "GateCert", "cz_gate", "logical_pauli", "m_support_sets", "phase_gate",
    "sx_gate", "synthesize_logical_single_qubit", "transparency_check",
    "verify_logical",
    "Channel", "NoiseModel", "SimResult", "entanglement_fidelity",
    "jx_dephasing", "kl_recovery", "lindblad_channel", "projector_recovery",
    "sweep", "validate_channel",
    "BoundReport", "logical_error_estimate", "min_grade_from_dims",
    "singleton_check",
    "CapabilityError", "CodeFileError", "SupportOverlapError",
]

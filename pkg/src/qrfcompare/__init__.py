"""Changes of quantum reference frame for Z_N, compared across three frameworks.

The perspective-neutral, extra-particle and operational changes of frame are
implemented on dense state vectors and density matrices, together with the
twirls, reductions and relativization maps they are built from.
"""

from .approaches import (
    ExtraParticleState,
    MultiSectorError,
    NotPhysicalStateError,
    OperationalClass,
    disentangler,
    ep_change,
    ep_change_operator,
    extract_extra_particle,
    frame_change_matrix,
    op_canonicalize,
    op_change,
    op_frame_change,
    pn_change,
    pn_change_global,
)
from .frames import (
    DegenerateFrameError,
    FramedObservable,
    FrameSpec,
    NonIdealFrameError,
    RelativeState,
    dephase_toward_frame,
    framed_to_operator,
    predual_reduce,
    reconstruct,
    reduce,
    relativize,
)
from .group import (
    CyclicGroup,
    NotInvariantError,
    charge_projector,
    charge_weights,
    fourier_vector,
    global_unitary,
    shift_operator,
)
from .linalg import (
    DensityOperator,
    Operator,
    RegisterLayout,
    StateVector,
    dephase_register,
    partial_trace,
    span_intersection,
    span_rank,
    tensor,
)
from .paths import PathReport, frame_change_paths
from .report import Check, VerificationReport, emit_report, render_density, render_ket
from .scenario import ScenarioConfig, build_psi, build_state, compare, fuzz, run_worked_example
from .twirl import Twirl, coherent_twirl, incoherent_twirl, is_invariant_state, is_invariant_vector

__version__ = "0.1.0"

__all__ = [
    "build_psi",
    "build_state",
    "charge_projector",
    "charge_weights",
    "Check",
    "coherent_twirl",
    "compare",
    "CyclicGroup",
    "DegenerateFrameError",
    "DensityOperator",
    "dephase_register",
    "dephase_toward_frame",
    "disentangler",
    "emit_report",
    "ep_change",
    "ep_change_operator",
    "extract_extra_particle",
    "ExtraParticleState",
    "fourier_vector",
    "frame_change_matrix",
    "frame_change_paths",
    "framed_to_operator",
    "FramedObservable",
    "FrameSpec",
    "fuzz",
    "global_unitary",
    "incoherent_twirl",
    "is_invariant_state",
    "is_invariant_vector",
    "MultiSectorError",
    "NonIdealFrameError",
    "NotInvariantError",
    "NotPhysicalStateError",
    "op_canonicalize",
    "op_change",
    "op_frame_change",
    "OperationalClass",
    "Operator",
    "partial_trace",
    "PathReport",
    "pn_change",
    "pn_change_global",
    "predual_reduce",
    "reconstruct",
    "reduce",
    "RegisterLayout",
    "RelativeState",
    "relativize",
    "render_density",
    "render_ket",
    "run_worked_example",
    "ScenarioConfig",
    "shift_operator",
    "span_intersection",
    "span_rank",
    "StateVector",
    "tensor",
    "Twirl",
    "VerificationReport",
]

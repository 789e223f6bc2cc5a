"""Finite-dimensional g-fusion and K-g-fusion frames."""

from gfusion.duals import (
    Coupling,
    DualPair,
    canonical_dual,
    reconstruct,
    reconstruction_operators,
    transported_dual,
    verify_dual_operator,
)
from gfusion.frames import (
    BoundCertificate,
    CertificateKind,
    DirectSumVector,
    FrameBounds,
    FrameClass,
    FrameMember,
    FrameOperator,
    GFusionFamily,
    analysis_apply,
    assemble_frame_operator,
    optimal_bounds,
    optimal_k_lower_bound,
    quadratic_form,
    synthesis_apply,
    synthesis_matrix,
    verify_certificate,
)
from gfusion.quotient import (
    EquivalenceReport,
    QuotientOperator,
    make_quotient,
    quotient_equivalence_report,
)
from gfusion.stability import (
    PerturbationReport,
    dual_stability_report,
    mixed_synthesis_check,
    operator_distances,
    perturbation_gap,
)
from gfusion.transforms import (
    Provenance,
    TransformResult,
    conjugate_transform,
    conjugated_family,
    k_dual_transform,
    member_map_transform,
    projected_dual_transform,
    pull_back_transform,
)

__version__ = "0.1.0"

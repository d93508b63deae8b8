"""Numerical toolkit for the partial theta function theta(q, x) = sum q^(j(j+1)/2) x^j.

Capabilities: certified evaluation of the series and its derivatives, real zero
bracketing/refinement and curve tracing in q, double-zero (spectral) solving,
complex zero counting and pair tracking, plus classical identity checks.
"""

from __future__ import annotations

from .errors import (
    BoundaryTooClose,
    CoalescenceSuspected,
    DivergesAtZero,
    DomainError,
    LostTrack,
    MultipleRootsFound,
    NoConvergence,
    NoSignChange,
    PartialThetaError,
    PhaseJump,
    SingularJacobian,
    StepCollapse,
    TailNotConverged,
)
from .evaluate import (
    DEFAULT_CONFIG,
    Approx,
    EvalConfig,
    Point,
    family_to_accuracy,
    peak_term_log10,
    theta,
    theta_dq,
    theta_dx,
    theta_dx2,
    theta_family,
    theta_to_accuracy,
)
from .identities import (
    IdentityCheck,
    imag_axis_decomposition,
    jacobi_theta,
    k1_k2,
    phi_k,
    phi_k_functional_residual,
    phi_neg_halfint_identity_residual,
    phi_partial_sum,
    phi_partial_sum_dq,
    phi_small,
    phi_square_product,
    psi_decomposition,
    tail_G,
    theta_at_one_product,
)
from .complexzeros import (
    AuditReport,
    PairTrack,
    Region,
    audit_json,
    containment_audit,
    count_zeros,
    crossing_via_interlacing,
    master_region,
    no_crossing_qneg,
    pair_count,
    pair_track_csv,
    track_pair,
    ysharp_pair,
)
from .realzeros import (
    LOWER,
    REGIMES,
    UPPER,
    Bracket,
    ZeroCurve,
    bracket_real_zeros_qpos,
    halfpower_slope_check,
    ordering_check_qneg,
    refine_zero,
    root_on_power_curve,
    sign_pattern_check,
    trace_curve,
    zero_curve_csv,
    zeros_qneg,
)
from .spectrum import (
    AsymptoticRow,
    BoundSequences,
    SpectralPoint,
    asymptotic_report,
    bound_sequences,
    double_zero_bounds_check,
    find_double_zero,
    first_two_zeros_bound,
    fold_qpos,
    spectrum_csv,
    spectrum_json,
    spectrum_qneg,
    spectrum_qpos,
    verify_fold_sign_change,
)

__all__ = [
    "Approx",
    "AsymptoticRow",
    "AuditReport",
    "BoundSequences",
    "BoundaryTooClose",
    "Bracket",
    "CoalescenceSuspected",
    "DEFAULT_CONFIG",
    "DivergesAtZero",
    "DomainError",
    "EvalConfig",
    "IdentityCheck",
    "LOWER",
    "LostTrack",
    "MultipleRootsFound",
    "NoConvergence",
    "NoSignChange",
    "PairTrack",
    "PartialThetaError",
    "PhaseJump",
    "Point",
    "REGIMES",
    "Region",
    "SingularJacobian",
    "SpectralPoint",
    "StepCollapse",
    "TailNotConverged",
    "UPPER",
    "ZeroCurve",
    "asymptotic_report",
    "audit_json",
    "bound_sequences",
    "bracket_real_zeros_qpos",
    "containment_audit",
    "count_zeros",
    "crossing_via_interlacing",
    "double_zero_bounds_check",
    "family_to_accuracy",
    "find_double_zero",
    "first_two_zeros_bound",
    "fold_qpos",
    "halfpower_slope_check",
    "imag_axis_decomposition",
    "jacobi_theta",
    "k1_k2",
    "master_region",
    "no_crossing_qneg",
    "ordering_check_qneg",
    "pair_count",
    "pair_track_csv",
    "peak_term_log10",
    "phi_k",
    "phi_k_functional_residual",
    "phi_neg_halfint_identity_residual",
    "phi_partial_sum",
    "phi_partial_sum_dq",
    "phi_small",
    "phi_square_product",
    "psi_decomposition",
    "refine_zero",
    "root_on_power_curve",
    "sign_pattern_check",
    "spectrum_csv",
    "spectrum_json",
    "spectrum_qneg",
    "spectrum_qpos",
    "tail_G",
    "theta",
    "theta_at_one_product",
    "theta_dq",
    "theta_dx",
    "theta_dx2",
    "theta_family",
    "theta_to_accuracy",
    "track_pair",
    "trace_curve",
    "verify_fold_sign_change",
    "zero_curve_csv",
    "zeros_qneg",
]

__version__ = "0.1.0"

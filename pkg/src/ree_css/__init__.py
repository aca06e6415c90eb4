"""Inverse closest-separable-state construction for the relative entropy of entanglement."""

__version__ = "0.1.0"

from .appendix import appendix_suite
from .boundary import (
    BOUNDARY,
    INTERIOR,
    OUTSIDE,
    Hyperplane,
    PsiWitness,
    boundary_membership,
    gen_boundary_state,
    gen_singular_boundary_state,
    hyperplane_from_kernel,
    paper_example_sigma,
    psi_from_phi,
    pt_kernel,
    tensor_hyperplane,
)
from .css import (
    NATS_TO_BITS,
    CssFamily,
    build_family,
    css_condition_value,
    family_state,
    ree_closed,
    segment_family,
    segment_t_max,
    witness_operator,
)
from .errors import DomainError, EigenError, ProjectionError, VerificationError
from .linalg import RANK_TOL, Spectrum, eigh, mat_log_support, partial_transpose, psd_rank, trace_inner
from .lsigma import DividedDifferenceKernel, apply_L, apply_L_pinv, build_kernel, expansion_residual, support_projector
from .oracle import OracleConfig, OracleResult, css_numeric, dykstra_project, product_state_max, rel_entropy

__all__ = [name for name in dir() if not name.startswith("_")]

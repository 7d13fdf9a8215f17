"""Exact arithmetic of pencils of quadratic forms over QQ, its completions and finite fields."""

from .exact import IntPolynomial, det_exact, isolate_real_roots, kronecker_factor_upto, rational_roots
from .localglobal import (
    Place,
    albert_form,
    clifford_albert,
    contains_rH_report,
    global_witt_index,
    hasse_invariant,
    hilbert_symbol,
    local_invariants,
    local_witt_index,
)
from .pencil import (
    MemberParameter,
    Pencil,
    build_pencil,
    discriminant_curve,
    is_smooth,
    member_with_global_witt,
    member_with_local_witt,
    padic_nonsquare_det_member,
    real_half_hyperbolic_member,
    stratify,
)
from .qform import QuadraticForm
from .search import isotropic_plane, isotropic_vector, point_search, quadratic_point_from_line

__version__ = "0.1.0"

__all__ = [
    "IntPolynomial",
    "MemberParameter",
    "Pencil",
    "Place",
    "QuadraticForm",
    "albert_form",
    "build_pencil",
    "clifford_albert",
    "contains_rH_report",
    "det_exact",
    "discriminant_curve",
    "global_witt_index",
    "hasse_invariant",
    "hilbert_symbol",
    "is_smooth",
    "isolate_real_roots",
    "isotropic_plane",
    "isotropic_vector",
    "kronecker_factor_upto",
    "local_invariants",
    "local_witt_index",
    "member_with_global_witt",
    "member_with_local_witt",
    "padic_nonsquare_det_member",
    "point_search",
    "quadratic_point_from_line",
    "rational_roots",
    "real_half_hyperbolic_member",
    "stratify",
]

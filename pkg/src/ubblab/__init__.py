"""Construction and verification of four-qudit unextendible biseparable bases."""

__version__ = "0.1.0"

from .certify import (
    CheckResult,
    Verdict,
    verify_biseparability,
    verify_counts,
    verify_distillability,
    verify_ges,
    verify_orthogonality,
    verify_strong_nonlocality,
    verify_unextendibility,
)
from .families import (
    Role,
    StateFamily,
    build_ges_basis,
    build_psi,
    build_psi_plus,
    build_stopper,
    build_subset,
    build_ubb,
    eta,
    xi,
)
from .linalg import hermitian_constraint_nullspace, min_second_singular, numeric_rank
from .prover import check_unextendibility_symbolic, derive_pattern, prove_no_rank1
from .tensor import ALL_BIPARTITIONS, Bipartition, Ket, inner, matricize, partial_trace, schmidt_values

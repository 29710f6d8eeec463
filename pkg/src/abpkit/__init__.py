"""Exact constructions and checks for algebraic branching programs,
determinantal expressions and iterated matrix multiplication over F_p."""

from .abp import Abp, AbpReport, AbpValidationError, compute_polynomial, evaluate, homogenize, validate
from .detexpr import (
    DetExpr,
    EliminationConjugation,
    FirstColumnOp,
    FirstRowOp,
    PermutationConjugation,
    abp_to_detexpr,
    apply_group_op,
    check_lemma_properties,
    emit_text,
    find_monomial_witness,
    profile,
    restrict,
    standardize,
)
from .field import DEFAULT_PRIME, get_prime, use_prime
from .imm import (
    HimmExpr,
    ImmExpr,
    MatrixPowerExpr,
    check_block_multilinear,
    dlabp_to_himm,
    grenet_dlabp,
    grenet_perm,
    himm_to_dlabp,
    labp_to_imm,
    to_matrix_power,
)
from .lowerbound import LayerRankCertificate, certify_binomial_bound, certify_nosqueeze, layer_rank
from .mahajan_vinay import build_mv_abp, mv_size
from .oracles import det_reference, perm_reference
from .pit import PitResult, expand_symbolic, pit_equal
from .poly import AffineForm, SparsePoly, VarId, eval_affine

__all__ = [
    "Abp",
    "AbpReport",
    "AbpValidationError",
    "AffineForm",
    "DEFAULT_PRIME",
    "DetExpr",
    "EliminationConjugation",
    "FirstColumnOp",
    "FirstRowOp",
    "HimmExpr",
    "ImmExpr",
    "LayerRankCertificate",
    "MatrixPowerExpr",
    "PermutationConjugation",
    "PitResult",
    "SparsePoly",
    "VarId",
    "abp_to_detexpr",
    "apply_group_op",
    "build_mv_abp",
    "certify_binomial_bound",
    "certify_nosqueeze",
    "check_block_multilinear",
    "check_lemma_properties",
    "compute_polynomial",
    "det_reference",
    "dlabp_to_himm",
    "emit_text",
    "eval_affine",
    "evaluate",
    "expand_symbolic",
    "find_monomial_witness",
    "get_prime",
    "grenet_dlabp",
    "grenet_perm",
    "himm_to_dlabp",
    "homogenize",
    "labp_to_imm",
    "layer_rank",
    "mv_size",
    "perm_reference",
    "pit_equal",
    "profile",
    "restrict",
    "standardize",
    "to_matrix_power",
    "use_prime",
    "validate",
]

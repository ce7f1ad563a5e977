"""Legendre Tucker rank reduction for non-negative tensors."""

from ._core import (
    ParseError,
    best_rank1,
    certify,
    detect_bingos,
    eta,
    from_eta,
    from_theta,
    is_rank1,
    kl_divergence,
    ls_error,
    mode_k_expansion,
    ntd_fit,
    reduce,
    sample_bingo_spec,
    theta,
    tucker_rank,
    worst_case_cost,
)

__all__ = [
    "ParseError",
    "best_rank1",
    "certify",
    "detect_bingos",
    "eta",
    "from_eta",
    "from_theta",
    "is_rank1",
    "kl_divergence",
    "ls_error",
    "mode_k_expansion",
    "ntd_fit",
    "reduce",
    "sample_bingo_spec",
    "theta",
    "tucker_rank",
    "worst_case_cost",
]

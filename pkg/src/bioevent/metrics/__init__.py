"""Agreement, divergence and corpus profile statistics."""

from .agreement import AgreementReport, cohen_kappa, pairwise_iaa
from .divergence import (
    Basis,
    DivergenceMatrix,
    DivergenceResult,
    basis_counts,
    jsd,
    jsd_matrix,
    normalize,
    parse_basis,
    token_lemma,
)
from .profile import CorpusProfile, corpus_profile, write_profiles_csv

__all__ = [
    "AgreementReport", "Basis", "CorpusProfile", "DivergenceMatrix", "DivergenceResult",
    "basis_counts", "cohen_kappa", "corpus_profile", "jsd", "jsd_matrix", "normalize",
    "pairwise_iaa", "parse_basis", "token_lemma", "write_profiles_csv",
]

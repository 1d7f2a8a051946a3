"""Invariant maximal commutative subalgebras of CP maps and Lindblad generators."""
from .ccpgen import (
    CcpGenerator,
    CcpGnsGram,
    CeForm,
    LindbladForm,
    NotConditionallyCompletelyPositive,
    assemble_ce,
    assemble_lindblad,
    ccp_bruteforce_oracle,
    ce_from_lindblad,
    derivation_identity_check,
    gns_gram,
    is_ccp,
    is_markov_generator,
    lindblad_decompose,
)
from .cpmap import CpMap, GnsData, NotCompletelyPositive, choi_of, compose, dual, gns_of, is_cp, is_unital, kraus_from_choi
from .densemat import DEFAULT_TOL, PreconditionError, Tolerance
from .evolve import invariance_over_time, offdiag_decay, semigroup_at, trajectory
from .invariance import (
    AlphaCertificate,
    ClassicalGenerator,
    NotFound,
    ZetaCertificate,
    alpha_certificate,
    crosscheck_theorems,
    direct_invariant_cp,
    direct_invariant_gen,
    lemma44_check,
    rebolledo_check,
    restrict_classical,
    restrict_stochastic,
    zeta_certificate,
)
from .subalg import (
    CommutativeSubalgebra,
    StarAlgebra,
    commutant,
    diagonal_masa,
    full_algebra,
    is_maximal_commutative,
    masa_from_hermitian,
    masa_in_basis,
    minimal_projections,
    span_closure,
)

__version__ = "0.1.0"

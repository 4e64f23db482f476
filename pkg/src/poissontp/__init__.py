"""Pure-state spaces with a transition probability and a Poisson bracket.

Quantum sectors are projective spaces P(C^n) with the Born-rule transition
probability; classical sectors are finite point sets with the delta
transition probability.  The package evaluates brackets and flows, checks
the axioms as numerical properties, and rebuilds the observable algebra
from transition probabilities alone.
"""

__version__ = "0.1.0"

from .core import HermitianOperator, eig_hermitian, expm_skew, random_hermitian, random_unit_vector, seeded_rng
from .states import (
    ClassicalDiscrete,
    Observable,
    PureState,
    QuantumSector,
    StateSpace,
    basis_state,
    decompose_sectors,
    expectation,
    make_state,
    observable_of,
    p_rho,
    transition_probability,
)
from .transition import Subspace, check_qm2, orthoclosure, orthoplement, superpositions
from .poisson import (
    BracketOracle,
    FlowResult,
    bracket,
    bracket_observable,
    canonical_bracket,
    check_unitarity,
    hamiltonian_flow,
    infer_hbar,
    symplectic_leaf_rank,
)
from .reconstruct import identify_algebra, jordan, random_observable, spectral_resolve, square, star_product
from .lattice import check_atomic, check_covering, check_orthomodular, complement, join, meet
from .axioms import SuiteConfig, SuiteReport, run_cm_suite, run_lattice_suite, run_qm_suite, run_reconstruction_suite

__all__ = [
    "HermitianOperator",
    "eig_hermitian",
    "expm_skew",
    "random_hermitian",
    "random_unit_vector",
    "seeded_rng",
    "ClassicalDiscrete",
    "Observable",
    "PureState",
    "QuantumSector",
    "StateSpace",
    "basis_state",
    "decompose_sectors",
    "expectation",
    "make_state",
    "observable_of",
    "p_rho",
    "transition_probability",
    "Subspace",
    "check_qm2",
    "orthoclosure",
    "orthoplement",
    "superpositions",
    "BracketOracle",
    "FlowResult",
    "bracket",
    "bracket_observable",
    "canonical_bracket",
    "check_unitarity",
    "hamiltonian_flow",
    "infer_hbar",
    "symplectic_leaf_rank",
    "identify_algebra",
    "jordan",
    "random_observable",
    "spectral_resolve",
    "square",
    "star_product",
    "check_atomic",
    "check_covering",
    "check_orthomodular",
    "complement",
    "join",
    "meet",
    "SuiteConfig",
    "SuiteReport",
    "run_cm_suite",
    "run_lattice_suite",
    "run_qm_suite",
    "run_reconstruction_suite",
]

"""Optimality-preserving reduction of Ising and QUBO instances."""

from .bounds import Relation, classify_pair, fast_score, general_lower_bound, similarity_score, triangle_score
from .compress import ContradictionError, ReductionFunction, ReductionMap
from .engine import DEFAULT_ALPHA, Reduction, RunReport, reduce_hamiltonian, run
from .estimator import HamiltonianReducer
from .instances import (
    MAXCUT_COUPLING_SIGN,
    DecimalWeightError,
    GeneratorSpec,
    ParseError,
    generate,
    parse_ising,
    parse_maxcut,
    parse_qubo,
    write_ising,
    write_qubo,
)
from .model import IsingHamiltonian, ModelError, QuboInstance, SKGraph, ising_to_sk, qubo_to_ising
from .validation import check_alpha, check_hamiltonian

__all__ = [
    "DEFAULT_ALPHA",
    "MAXCUT_COUPLING_SIGN",
    "ContradictionError",
    "DecimalWeightError",
    "GeneratorSpec",
    "HamiltonianReducer",
    "IsingHamiltonian",
    "ModelError",
    "ParseError",
    "QuboInstance",
    "Reduction",
    "ReductionFunction",
    "ReductionMap",
    "Relation",
    "RunReport",
    "SKGraph",
    "check_alpha",
    "check_hamiltonian",
    "classify_pair",
    "fast_score",
    "general_lower_bound",
    "generate",
    "ising_to_sk",
    "parse_ising",
    "parse_maxcut",
    "parse_qubo",
    "qubo_to_ising",
    "reduce_hamiltonian",
    "run",
    "similarity_score",
    "triangle_score",
    "write_ising",
    "write_qubo",
]

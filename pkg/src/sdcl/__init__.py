"""Subsumption-driven clause learning SAT solver and pebbling benchmark kit."""

from .cnf import (
    Formula,
    apply_subsumption,
    make_clause,
    negate,
    parse_dimacs,
    subsumes,
    write_dimacs,
)
from .proof import ProofTrace, brute_force_solve, check_rup, is_implicate, verify
from .solver import Outcome, Solver, SolverConfig, SolverStats, solve_formula

__all__ = [
    "Formula",
    "Outcome",
    "ProofTrace",
    "Solver",
    "SolverConfig",
    "SolverStats",
    "apply_subsumption",
    "brute_force_solve",
    "check_rup",
    "is_implicate",
    "make_clause",
    "negate",
    "parse_dimacs",
    "solve_formula",
    "subsumes",
    "verify",
    "write_dimacs",
]

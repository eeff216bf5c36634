from __future__ import annotations

import random

import pytest

from sdcl.cnf import Formula

# Satisfiable 6-variable fixture (x,y,z,r,s,t -> 1..6): every pair among
# {x,y,z} implies r, plus (¬r ∨ ¬s ∨ ¬t).
PAIR_FORCING_CLAUSES = [
    [-1, -2, 4], [-1, 2, 4], [1, -2, 4], [1, 2, 4],
    [-1, -3, 4], [-1, 3, 4], [1, -3, 4], [1, 3, 4],
    [-2, -3, 4], [-2, 3, 4], [2, -3, 4], [2, 3, 4],
    [-4, -5, -6],
]


def pair_forcing_formula() -> Formula:
    f = Formula(6)
    for c in PAIR_FORCING_CLAUSES:
        f.add_clause(c)
    return f


@pytest.fixture
def pair_forcing() -> Formula:
    return pair_forcing_formula()


def formula_from(clauses, num_vars=0) -> Formula:
    f = Formula(num_vars)
    for c in clauses:
        f.add_clause(c)
    return f


def random_3cnf(rng: random.Random, num_vars: int, num_clauses: int) -> list[list[int]]:
    clauses = []
    for _ in range(num_clauses):
        vs = rng.sample(range(1, num_vars + 1), 3)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return clauses

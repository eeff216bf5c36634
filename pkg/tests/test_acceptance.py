"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Shared campaign fixtures run the pyramid series and the random-instance grid
once per session; individual criteria assert against those results.
"""
from __future__ import annotations

import random

import pytest

from sdcl.cnf import Formula, make_clause
from sdcl.pebbling import generate, implication_clauses, pyramid, stage_plan
from sdcl.proof import ProofTrace, _RupDatabase, brute_force_solve, is_implicate, verify
from sdcl.solver import Solver, SolverConfig
from conftest import PAIR_FORCING_CLAUSES, formula_from, random_3cnf, pair_forcing_formula

RATIOS = (3.0, 4.26, 5.0)
VAR_RANGE = range(10, 17)
INSTANCES_PER_CELL = 50
SOLVER_SEEDS = (0, 1, 2)


def report(criterion: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def pyramid_runs():
    """Solve pyramid(rows, 2) for rows 3..10 with the default config."""
    runs = {}
    for rows in range(3, 11):
        inst = generate(pyramid(rows, 2))
        literals = inst.formula.total_live_literals
        clauses = inst.formula.alive_permanent
        solver = Solver(inst.formula)
        outcome = solver.solve()
        runs[rows] = {
            "instance": inst,
            "original": solver.original_clauses,
            "outcome": outcome,
            "initial_clauses": clauses,
            "initial_literals": literals,
        }
    return runs


@pytest.fixture(scope="module")
def random_campaign():
    """The criterion-5 grid: 1050 instances, each solved with 3 seeds."""
    results = []
    for num_vars in VAR_RANGE:
        for ratio in RATIOS:
            for index in range(INSTANCES_PER_CELL):
                rng = random.Random((num_vars, int(ratio * 100), index).__hash__())
                clauses = random_3cnf(rng, num_vars, round(num_vars * ratio))
                expected = brute_force_solve([tuple(c) for c in clauses])[0]
                per_seed = []
                for seed in SOLVER_SEEDS:
                    solver = Solver(formula_from(clauses, num_vars), SolverConfig(seed=seed))
                    outcome = solver.solve()
                    per_seed.append((seed, solver.original_clauses, outcome))
                results.append((clauses, expected, per_seed))
    return results


PYRAMID3_EXPECTED_LEARNED = {
    (-3, 7, 8), (-4, 7, 8), (7, 8),
    (-5, 9, 10), (-6, 9, 10), (9, 10),
    (-9, 11, 12), (-10, 11, 12), (11, 12),
}


def test_criterion_1_stage_listing_reproduction(pyramid_runs):
    run = pyramid_runs[3]
    outcome = run["outcome"]
    learned = [
        e.clause
        for e in outcome.proof
        if e.kind == "add" and not e.transient and e.clause
    ]
    planned = {s.produces for s in stage_plan(run["instance"])}
    ok = (
        outcome.status == "unsat"
        and len(learned) == 9
        and set(learned) == PYRAMID3_EXPECTED_LEARNED == planned
        and outcome.proof.contains_empty
        and outcome.stats.wall_time < 1.0
    )
    report(1, ok, f"pyramid(3,2) learned {len(learned)} clauses "
                  f"(match={set(learned) == PYRAMID3_EXPECTED_LEARNED}) in {outcome.stats.wall_time:.3f}s")


def test_criterion_2_linear_scaling(pyramid_runs):
    points = []
    for rows in range(3, 11):
        run = pyramid_runs[rows]
        st = run["outcome"].stats
        assert run["outcome"].status == "unsat"
        assert st.superficial_successes <= run["initial_literals"], (
            f"rows={rows}: {st.superficial_successes} successes > "
            f"{run['initial_literals']} literals"
        )
        assert st.wall_time < 5.0, f"rows={rows} took {st.wall_time:.2f}s"
        points.append((run["initial_clauses"], st.conflicts))
    n = len(points)
    sx = sum(x for x, _ in points)
    sy = sum(y for _, y in points)
    sxx = sum(x * x for x, _ in points)
    sxy = sum(x * y for x, y in points)
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
    intercept = (sy - slope * sx) / n
    worst = 0.0
    for x, y in points:
        fitted = slope * x + intercept
        worst = max(worst, abs(y - fitted) / abs(fitted))
    ok = worst <= 0.10
    report(2, ok, f"conflicts ~ {slope:.3f}*clauses{intercept:+.2f}, "
                  f"max residual {worst:.1%} (limit 10%)")


def test_criterion_3_linear_space(pyramid_runs):
    worst = []
    for rows, run in pyramid_runs.items():
        st = run["outcome"].stats
        assert st.peak_permanent_clauses <= run["initial_clauses"], (
            f"rows={rows}: peak {st.peak_permanent_clauses} > initial {run['initial_clauses']}"
        )
        assert run["instance"].formula.alive_transient == 0
        worst.append(st.peak_permanent_clauses - run["initial_clauses"])
    report(3, True, f"peak permanent clauses never exceeded the initial count "
                    f"(max excess {max(worst)})")


def test_criterion_4_entailment_property():
    checked = 0
    for n in range(0, 4):
        for k in (1, 2):
            in_vars = [[i * k + j + 1 for j in range(k)] for i in range(n)]
            out_vars = [n * k + j + 1 for j in range(k)]
            clauses = list(implication_clauses(in_vars, out_vars))
            clauses += [tuple(g) for g in in_vars]
            assert is_implicate(clauses, tuple(out_vars)), (n, k)
            checked += 1
    report(4, True, f"entailment holds for all {checked} (n, k) pairs with n<=3, k<=2")


def test_criterion_5_oracle_equivalence(random_campaign):
    solved = 0
    mismatches = []
    for clauses, expected, per_seed in random_campaign:
        for seed, original, outcome in per_seed:
            solved += 1
            if outcome.status != expected:
                mismatches.append((clauses, seed, expected, outcome.status))
    instances = len(random_campaign)
    ok = instances >= 1000 and not mismatches and len(SOLVER_SEEDS) >= 3
    report(5, ok, f"{instances} instances x {len(SOLVER_SEEDS)} seeds = {solved} solves, "
                  f"{len(mismatches)} oracle mismatches")


def _load_bearing_adds(original, trace):
    """Add events made while the database is not yet refutable by unit
    propagation alone; later additions are valid whatever their content."""
    db = _RupDatabase(list(original))
    out = []
    for i, e in enumerate(trace):
        if e.kind == "add":
            if e.clause and not db.propagates_to_conflict([]):
                out.append(i)
            db.add(e.clause)
        else:
            db.delete(e.clause)
    return out


def _flip_literal(trace, idx, pos):
    mutated = ProofTrace()
    for j, e in enumerate(trace):
        if j == idx:
            lits = list(e.clause)
            lits[pos] = -lits[pos]
            mutated.add(lits, e.transient)
        elif e.kind == "add":
            mutated.add(e.clause, e.transient)
        else:
            mutated.delete(e.clause)
    return mutated


def test_criterion_6_proof_soundness(pyramid_runs, random_campaign):
    # every unsat run from criteria 1-2 and 5 verifies
    verified = 0
    for run in pyramid_runs.values():
        assert verify(run["original"], run["outcome"].proof).ok
        verified += 1
    for _, expected, per_seed in random_campaign:
        for _, original, outcome in per_seed:
            if outcome.status == "unsat":
                assert verify(original, outcome.proof).ok
                verified += 1
    # 100 seeded single-literal mutations in the corruptible region
    rng = random.Random(2024)
    pool = [(run["original"], run["outcome"].proof) for run in pyramid_runs.values()]
    prefixes = [(o, t, _load_bearing_adds(o, t)) for o, t in pool]
    rejected = 0
    for _ in range(100):
        original, trace, adds = prefixes[rng.randrange(len(prefixes))]
        idx = rng.choice(adds)
        pos = rng.randrange(len(trace.events[idx].clause))
        mutated = _flip_literal(trace, idx, pos)
        if not verify(original, mutated).ok:
            rejected += 1
    ok = rejected == 100
    report(6, ok, f"{verified} unsat traces verified; {rejected}/100 mutations rejected")


def test_criterion_7_satisfiable_fixture():
    formula = pair_forcing_formula()
    oracle_status, oracle_model = brute_force_solve(formula)
    solver = Solver(pair_forcing_formula())
    outcome = solver.solve()
    ok = oracle_status == "sat" and outcome.status == "sat"
    for clause in PAIR_FORCING_CLAUSES:
        assert any(outcome.model[abs(l)] == (l > 0) for l in clause)
    report(7, ok, f"fixture answered sat by oracle ({oracle_status}) "
                  f"and solver ({outcome.status})")

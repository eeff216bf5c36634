"""Subsumption-driven clause learning solver.

The loop alternates a superficial sweep (one assumption sequence per clause,
learning only clauses that subsume an existing one) with budgeted advanced
attempts (exhaustive search under the assumption base, with Luby restarts and
transient branch nogoods). Every attempt starts from a fresh trail; top-level
unit propagation happens only in explicit global checks whose trails are
discarded, so assumption sequences can still name literals that standing
units would otherwise pre-assign.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .cnf import Clause, Formula, Lit, apply_subsumption, make_clause
from .engine import Engine
from .proof import ProofTrace


@dataclass
class SolverConfig:
    superficial_order: str = "age"  # "age" | "shortest"
    target_policy: str = "shortest"
    drop_policy: str = "canonical"
    assumption_order: str = "occurrence"
    initial_conflict_budget: int = 64
    budget_growth: float = 2.0
    restart_luby_unit: int = 64
    seed: int = 0
    max_seconds: Optional[float] = None
    strategy: str = "sdcl"  # "sdcl" | "dpll"

    def __post_init__(self):
        if self.initial_conflict_budget <= 0:
            raise ValueError("conflict budget must be positive")
        if self.budget_growth <= 1:
            raise ValueError("budget growth must exceed 1")
        if self.restart_luby_unit <= 0:
            raise ValueError("luby unit must be positive")


@dataclass
class SolverStats:
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0
    superficial_attempts: int = 0
    superficial_successes: int = 0
    advanced_attempts: int = 0
    advanced_successes: int = 0
    learned_permanent: int = 0
    learned_transient: int = 0
    deleted_subsumed: int = 0
    peak_permanent_clauses: int = 0
    restarts: int = 0
    wall_time: float = 0.0

    def as_row(self) -> dict:
        return {
            "decisions": self.decisions,
            "propagations": self.propagations,
            "conflicts": self.conflicts,
            "superficial_attempts": self.superficial_attempts,
            "superficial_successes": self.superficial_successes,
            "advanced_attempts": self.advanced_attempts,
            "advanced_successes": self.advanced_successes,
            "learned_permanent": self.learned_permanent,
            "learned_transient": self.learned_transient,
            "deleted_subsumed": self.deleted_subsumed,
            "peak_permanent_clauses": self.peak_permanent_clauses,
            "restarts": self.restarts,
        }


@dataclass
class Outcome:
    status: str  # "sat" | "unsat" | "unknown"
    model: Optional[dict[int, bool]] = None
    proof: Optional[ProofTrace] = None
    stats: SolverStats = field(default_factory=SolverStats)
    reason: Optional[str] = None


class SuperficialOutcome(Enum):
    LEARNED = "learned"
    NO_CONFLICT = "no_conflict"
    GLOBAL_UNSAT = "global_unsat"


class SweepStatus(Enum):
    PROGRESS = "progress"
    STUCK = "stuck"
    UNSAT = "unsat"
    SAT = "sat"


class TimeoutExpired(Exception):
    pass


def luby(i: int) -> int:
    """i-th element (1-based) of the Luby sequence 1,1,2,1,1,2,4,..."""
    k = 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        if i < (1 << k) - 1:
            return luby(i - (1 << (k - 1)) + 1)
        k += 1


class Solver:
    def __init__(self, formula: Formula, config: SolverConfig | None = None):
        self.formula = formula
        self.config = config or SolverConfig()
        self.stats = SolverStats(peak_permanent_clauses=formula.alive_permanent)
        self.proof = ProofTrace()
        self.engine = Engine(formula)
        self.original_clauses = formula.copy_alive()
        self._budgets: dict[int, int] = {}
        self._advanced_tries: dict[int, int] = {}
        self._cooldown: set[int] = set()
        self._model: Optional[dict[int, bool]] = None
        self._deadline: Optional[float] = None

    # -- plumbing -----------------------------------------------------------

    def _check_time(self) -> None:
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise TimeoutExpired()

    def _sync_propagations(self) -> None:
        self.stats.propagations = self.engine.propagations

    def _assumption_sequence(self, planned: Iterable[Lit]) -> list[Lit]:
        """Order the planned literals so their negations are assumed most
        frequent first (maximizing propagation), ties by variable index."""
        return sorted(planned, key=lambda l: (-self.formula.occurrences(-l), abs(l)))

    def _falsified_subset(self, planned: Iterable[Lit], extra: Optional[Lit] = None) -> Clause:
        lits = {l for l in planned if self.engine.value(l) is False}
        if extra is not None:
            lits.add(extra)
        return make_clause(lits)

    # -- superficial phase ----------------------------------------------------

    def attempt_superficial(
        self,
        target_id: int,
        dropped: Lit,
        order: Optional[list[Lit]] = None,
    ) -> tuple[SuperficialOutcome, Optional[Clause]]:
        """Assume negations of the target's literals (minus dropped) one at a
        time, propagating after each. A conflict learns the falsified subset
        of the planned literals, which subsumes the target."""
        target = self.formula.clause(target_id)
        if dropped not in target:
            raise ValueError(f"dropped literal {dropped} not in target clause")
        planned = [l for l in target if l != dropped]
        if order is None:
            order = self._assumption_sequence(planned)
        elif sorted(order) != sorted(planned):
            raise ValueError("order is not a permutation of the target minus dropped")
        engine = self.engine
        self.stats.superficial_attempts += 1
        for lit in order:
            assumption = -lit
            v = engine.value(assumption)
            if v is True:
                continue
            if v is False:
                # the pending assumption already contradicts the trail
                self.stats.conflicts += 1
                learned = self._falsified_subset(planned, extra=lit)
                self._sync_propagations()
                return (SuperficialOutcome.LEARNED, learned)
            engine.assume(assumption)
            self.stats.decisions += 1
            conflict = engine.propagate()
            if conflict is not None:
                self.stats.conflicts += 1
                learned = self._falsified_subset(planned)
                self._sync_propagations()
                if not learned:
                    return (SuperficialOutcome.GLOBAL_UNSAT, None)
                return (SuperficialOutcome.LEARNED, learned)
        self._sync_propagations()
        return (SuperficialOutcome.NO_CONFLICT, None)

    def _learn(self, clause: Clause, transient_ids: Optional[list[int]] = None) -> bool:
        """Record a permanent learned clause; returns True when the formula
        is refuted (empty clause emitted)."""
        self.proof.add(clause)
        self.stats.learned_permanent += 1
        if transient_ids:
            for cid in transient_ids:
                self.proof.delete(self.formula.literals(cid))
                self.formula.delete_clause(cid)
        if not clause:
            return True
        result = apply_subsumption(self.formula, clause)
        for cid in result.deleted:
            self.proof.delete(self.formula.literals(cid))
        self.stats.deleted_subsumed += len(result.deleted)
        self.stats.peak_permanent_clauses = max(
            self.stats.peak_permanent_clauses, self.formula.alive_permanent
        )
        self.engine.reset()
        self.engine.attach(result.added)
        if all(self.formula.unit_count(-l) > 0 for l in clause):
            # the new clause contradicts standing unit clauses: the empty
            # clause follows by unit propagation
            self.stats.conflicts += 1
            self.proof.add(())
            self.stats.learned_permanent += 1
            return True
        return False

    def _global_check(self) -> Optional[str]:
        """Propagate all unit clauses from scratch; detects refutation by
        unit propagation and total top-level models. Trail is discarded."""
        engine = self.engine
        engine.reset()
        conflict = engine.seed_units()
        if conflict is None:
            conflict = engine.propagate()
        self._sync_propagations()
        if conflict is not None:
            self.stats.conflicts += 1
            self.proof.add(())
            self.stats.learned_permanent += 1
            engine.reset()
            return "unsat"
        if engine.assigned_count() == self.formula.num_vars:
            self._model = self._complete_model()
            engine.reset()
            return "sat"
        engine.reset()
        return None

    def _sweep_targets(self) -> Iterable[int]:
        if self.config.superficial_order == "shortest":
            ids = sorted(
                self.formula.alive_ids(),
                key=lambda cid: (len(self.formula.clause(cid)), cid),
            )
            return ids
        # age order: ascending id, extended dynamically as clauses are learned
        def generator():
            cid = 0
            while cid < self.formula.next_id:
                yield cid
                cid += 1

        return generator()

    def superficial_sweep(self) -> SweepStatus:
        """One pass over alive clauses in policy order, trying drop candidates
        until a clause is learned; learning continues the pass. Starts with a
        global check so a top-level conflict yields the empty clause."""
        status = self._global_check()
        if status == "unsat":
            return SweepStatus.UNSAT
        if status == "sat":
            return SweepStatus.SAT
        progress = False
        restart = True
        while restart:
            restart = False
            for cid in self._sweep_targets():
                self._check_time()
                if not self.formula.is_alive(cid) or self.formula.is_transient(cid):
                    continue
                target = self.formula.clause(cid)
                if len(target) < 2:
                    continue
                for dropped in target:
                    self.engine.reset()
                    outcome, learned = self.attempt_superficial(cid, dropped)
                    if outcome is SuperficialOutcome.GLOBAL_UNSAT:
                        self.engine.reset()
                        self.proof.add(())
                        self.stats.learned_permanent += 1
                        return SweepStatus.UNSAT
                    if outcome is SuperficialOutcome.LEARNED:
                        self.stats.superficial_successes += 1
                        progress = True
                        if self._learn(learned):
                            return SweepStatus.UNSAT
                        if self.config.superficial_order == "shortest":
                            restart = True
                        break
                if restart:
                    break
        self.engine.reset()
        return SweepStatus.PROGRESS if progress else SweepStatus.STUCK

    # -- advanced phase ---------------------------------------------------------

    def select_target_clause(self) -> int:
        """Shortest alive clause outside the failure cooldown, ties by id."""
        best: Optional[int] = None
        best_key = None
        fallback: Optional[int] = None
        fallback_key = None
        for cid in self.formula.alive_ids():
            key = (len(self.formula.clause(cid)), cid)
            if fallback_key is None or key < fallback_key:
                fallback, fallback_key = cid, key
            if cid in self._cooldown:
                continue
            if best_key is None or key < best_key:
                best, best_key = cid, key
        if fallback is None:
            raise ValueError("no alive clause to target")
        if best is None:
            self._cooldown.clear()
            return fallback
        return best

    def _decide_literal(self) -> Lit:
        """Unassigned literal with the highest occurrence count among
        not-yet-satisfied alive clauses; ties by variable index, polarity
        rotated by the seed."""
        engine = self.engine
        scores: dict[int, int] = {}
        for cid in self.formula.alive_ids():
            clause = self.formula.clause(cid)
            free: list[int] = []
            satisfied = False
            for lit in clause:
                v = engine.value(lit)
                if v is True:
                    satisfied = True
                    break
                if v is None:
                    free.append(lit)
            if satisfied:
                continue
            for lit in free:
                scores[lit] = scores.get(lit, 0) + 1
        if not scores:
            for v in range(1, self.formula.num_vars + 1):
                if engine.value(v) is None:
                    return v
            raise ValueError("no unassigned variable left")
        best_score = max(scores.values())
        tied = sorted(
            (l for l, s in scores.items() if s == best_score),
            key=lambda l: (abs(l), l < 0),
        )
        return tied[self.config.seed % len(tied)]

    def _exhaustive_search(
        self, planned: list[Lit], budget: Optional[int], use_luby: bool
    ) -> tuple[str, object]:
        """Search all extensions of the assumption base (negations of the
        planned literals). Returns ("subsumed", clause), ("model", model) or
        ("budget", None). Refuted branches leave transient nogoods in the
        database for the duration of the search."""
        engine = self.engine
        engine.reset()
        transients: list[int] = []

        def cleanup() -> None:
            for cid in transients:
                if self.formula.is_alive(cid):
                    self.proof.delete(self.formula.literals(cid))
                    self.formula.delete_clause(cid)
            self._sync_propagations()

        try:
            return self._search_body(planned, budget, use_luby, transients, cleanup)
        except TimeoutExpired:
            cleanup()
            raise

    def _search_body(self, planned, budget, use_luby, transients, cleanup):
        engine = self.engine
        # install the assumption base
        for lit in self._assumption_sequence(planned):
            assumption = -lit
            v = engine.value(assumption)
            if v is True:
                continue
            if v is False:
                self.stats.conflicts += 1
                learned = self._falsified_subset(planned, extra=lit)
                cleanup()
                return ("subsumed", learned)
            engine.assume(assumption)
            self.stats.decisions += 1
            conflict = engine.propagate()
            if conflict is not None:
                self.stats.conflicts += 1
                learned = self._falsified_subset(planned)
                cleanup()
                return ("subsumed", learned)
        base_depth = engine.depth
        conflicts_here = 0
        since_restart = 0
        restart_index = 1
        limit = self.config.restart_luby_unit * luby(restart_index)
        while True:
            self._check_time()
            conflict = engine.propagate()
            if conflict is None:
                if engine.assigned_count() == self.formula.num_vars:
                    model = self._complete_model()
                    cleanup()
                    return ("model", model)
                lit = self._decide_literal()
                engine.assume(lit)
                self.stats.decisions += 1
                continue
            self.stats.conflicts += 1
            conflicts_here += 1
            since_restart += 1
            prefix_len = engine.depth - base_depth
            if prefix_len == 0:
                learned = self._falsified_subset(planned)
                self._sync_propagations()
                # transient deletions are appended by the caller after the
                # subsumer is logged, so its RUP check can use them
                return ("subsumed+pending", (learned, transients))
            nogood = engine.assumption_prefix_negation()
            self.proof.add(nogood, transient=True)
            self.stats.learned_transient += 1
            tid = self.formula.add_clause(nogood, transient=True)
            transients.append(tid)
            if budget is not None and conflicts_here >= budget:
                cleanup()
                return ("budget", None)
            if use_luby and since_restart >= limit:
                engine.backtrack_to(base_depth)
                since_restart = 0
                restart_index += 1
                limit = self.config.restart_luby_unit * luby(restart_index)
                self.stats.restarts += 1
                st, forced = engine.attach(tid)
                if st == "unit" and forced is not None:
                    engine.enqueue(forced, tid)
            else:
                engine.backtrack_to(base_depth + prefix_len - 1)
                st, forced = engine.attach(tid)
                if st == "unit" and forced is not None:
                    engine.enqueue(forced, tid)

    def attempt_advanced(
        self, target_id: int, dropped: Lit, budget: int
    ) -> tuple[str, object]:
        """Try to subsume the target by exhausting the search under the
        negations of its literals minus dropped. Returns ("subsumed", clause),
        ("model", model) or ("budget", None)."""
        if budget <= 0:
            raise ValueError("budget must be positive")
        target = self.formula.clause(target_id)
        if dropped not in target:
            raise ValueError(f"dropped literal {dropped} not in target clause")
        planned = [l for l in target if l != dropped]
        self.stats.advanced_attempts += 1
        kind, payload = self._exhaustive_search(planned, budget, use_luby=True)
        if kind == "subsumed+pending":
            learned, transients = payload
            return ("subsumed", (learned, transients))
        if kind == "subsumed":
            return ("subsumed", (payload, []))
        return (kind, payload)

    # -- models -------------------------------------------------------------------

    def _complete_model(self) -> dict[int, bool]:
        model = {v: False for v in range(1, self.formula.num_vars + 1)}
        model.update(self.engine.assign)
        return model

    def _validate_model(self, model: dict[int, bool]) -> None:
        for clause in self.original_clauses:
            if not any(model.get(abs(l), False) == (l > 0) for l in clause):
                raise AssertionError(f"model does not satisfy original clause {clause}")

    # -- top level ------------------------------------------------------------------

    def solve(self) -> Outcome:
        start = time.monotonic()
        if self.config.max_seconds is not None:
            self._deadline = start + self.config.max_seconds
        try:
            if self.config.strategy == "dpll":
                outcome = self._solve_dpll()
            else:
                outcome = self._solve_sdcl()
        except TimeoutExpired:
            outcome = Outcome("unknown", stats=self.stats, reason="timeout")
        self.stats.wall_time = time.monotonic() - start
        outcome.stats = self.stats
        return outcome

    def _finish_sat(self, model: dict[int, bool]) -> Outcome:
        self._validate_model(model)
        return Outcome("sat", model=model, stats=self.stats)

    def _solve_sdcl(self) -> Outcome:
        while True:
            status = self.superficial_sweep()
            if status is SweepStatus.UNSAT:
                return Outcome("unsat", proof=self.proof, stats=self.stats)
            if status is SweepStatus.SAT:
                return self._finish_sat(self._model or {})
            if status is SweepStatus.PROGRESS:
                continue
            if self.formula.alive_permanent == 0:
                return self._finish_sat(self._complete_model())
            # advanced phase: escalate budgets until one attempt completes
            while True:
                self._check_time()
                target_id = self.select_target_clause()
                target = self.formula.clause(target_id)
                tries = self._advanced_tries.get(target_id, 0)
                self._advanced_tries[target_id] = tries + 1
                dropped = target[tries % len(target)] if target else None
                budget = self._budgets.get(target_id, self.config.initial_conflict_budget)
                if not target:
                    kind, payload = "subsumed", ((), [])
                else:
                    kind, payload = self.attempt_advanced(target_id, dropped, budget)
                if kind == "model":
                    return self._finish_sat(payload)
                if kind == "budget":
                    self._budgets[target_id] = max(
                        budget + 1, int(budget * self.config.budget_growth)
                    )
                    self._cooldown.add(target_id)
                    continue
                learned, transients = payload
                self.stats.advanced_successes += 1
                if self._learn(learned, transient_ids=transients):
                    return Outcome("unsat", proof=self.proof, stats=self.stats)
                break  # back to the superficial sweep

    def _solve_dpll(self) -> Outcome:
        """Plain chronological DPLL baseline: no permanent learning; branch
        nogoods are kept only to drive flips and make the trace checkable."""
        status = self._global_check()
        if status == "unsat":
            return Outcome("unsat", proof=self.proof, stats=self.stats)
        if status == "sat":
            return self._finish_sat(self._model or {})
        kind, payload = self._exhaustive_search([], budget=None, use_luby=False)
        if kind == "model":
            return self._finish_sat(payload)
        learned, transients = payload if kind == "subsumed+pending" else (payload, [])
        # refuted with no assumptions: the empty clause ends the run
        self.proof.add(())
        self.stats.learned_permanent += 1
        for cid in transients:
            if self.formula.is_alive(cid):
                self.proof.delete(self.formula.literals(cid))
                self.formula.delete_clause(cid)
        return Outcome("unsat", proof=self.proof, stats=self.stats)


def solve_formula(formula: Formula, config: SolverConfig | None = None) -> Outcome:
    return Solver(formula, config).solve()

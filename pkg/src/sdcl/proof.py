"""Proof traces, an independent RUP verifier with deletion support, and a
brute-force oracle for small instances.

The verifier deliberately uses counter-based propagation rather than the
solver's watched literals, so the two never share the code path under test.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .cnf import Clause, Formula, Lit, make_clause

ORACLE_VAR_CAP = 26


@dataclass(frozen=True)
class ProofEvent:
    kind: str  # "add" | "delete"
    clause: Clause
    transient: bool = False


@dataclass
class ProofTrace:
    events: list[ProofEvent] = field(default_factory=list)

    def add(self, clause: Iterable[Lit], transient: bool = False) -> None:
        self.events.append(ProofEvent("add", make_clause(clause), transient))

    def delete(self, clause: Iterable[Lit]) -> None:
        self.events.append(ProofEvent("delete", make_clause(clause)))

    @property
    def contains_empty(self) -> bool:
        return any(e.kind == "add" and not e.clause for e in self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def to_text(self) -> str:
        lines = []
        for e in self.events:
            body = " ".join(str(l) for l in e.clause)
            body = body + " 0" if body else "0"
            if e.kind == "delete":
                lines.append("d " + body)
            else:
                if e.transient:
                    lines.append("c t")
                lines.append(body)
        return "\n".join(lines) + "\n" if lines else ""

    @staticmethod
    def from_text(text: str) -> "ProofTrace":
        trace = ProofTrace()
        transient_next = False
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("c"):
                transient_next = line.split() == ["c", "t"]
                continue
            kind = "add"
            if line.startswith("d"):
                kind = "delete"
                line = line[1:].strip()
            try:
                nums = [int(t) for t in line.split()]
            except ValueError as exc:
                raise ValueError(f"proof line {lineno}: {exc}") from None
            if not nums or nums[-1] != 0:
                raise ValueError(f"proof line {lineno}: missing 0 terminator")
            if any(n == 0 for n in nums[:-1]):
                raise ValueError(f"proof line {lineno}: literal 0 inside clause")
            clause = nums[:-1]
            if kind == "delete":
                trace.delete(clause)
            else:
                trace.add(clause, transient=transient_next)
            transient_next = False
        return trace


@dataclass(frozen=True)
class Verdict:
    ok: bool
    step: Optional[int] = None
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


class _RupDatabase:
    """Clause database with counter-based unit propagation for RUP checks."""

    def __init__(self, clauses: Iterable[Clause]):
        self.clauses: list[Clause] = []
        self.alive: list[bool] = []
        self.by_set: dict[frozenset, list[int]] = {}
        self.occ: dict[int, list[int]] = {}
        for c in clauses:
            self.add(c)

    def add(self, clause: Clause) -> int:
        cid = len(self.clauses)
        self.clauses.append(clause)
        self.alive.append(True)
        self.by_set.setdefault(frozenset(clause), []).append(cid)
        for lit in clause:
            self.occ.setdefault(lit, []).append(cid)
        return cid

    def delete(self, clause: Clause) -> bool:
        ids = self.by_set.get(frozenset(clause))
        while ids:
            cid = ids.pop()
            if self.alive[cid]:
                self.alive[cid] = False
                return True
        return False

    def propagates_to_conflict(self, assertions: Iterable[Lit]) -> bool:
        """Assert the given literals as units and propagate to fixpoint."""
        assign: dict[int, bool] = {}
        queue: list[Lit] = []

        def assert_lit(lit: Lit) -> bool:
            var = abs(lit)
            want = lit > 0
            if var in assign:
                return assign[var] == want
            assign[var] = want
            queue.append(lit)
            return True

        for lit in assertions:
            if not assert_lit(lit):
                return True
        for cid, clause in enumerate(self.clauses):
            if not self.alive[cid]:
                continue
            if not clause:
                return True  # empty clause present
            if len(clause) == 1 and not assert_lit(clause[0]):
                return True  # standing unit contradicts an assertion
        n_false = [0] * len(self.clauses)
        qi = 0
        while qi < len(queue):
            lit = queue[qi]
            qi += 1
            for cid in self.occ.get(-lit, ()):
                if not self.alive[cid]:
                    continue
                clause = self.clauses[cid]
                n_false[cid] += 1
                if n_false[cid] < len(clause) - 1:
                    continue
                forced = None
                satisfied = False
                for l in clause:
                    v = assign.get(abs(l))
                    if v is None:
                        forced = l
                    elif v == (l > 0):
                        satisfied = True
                        break
                if satisfied:
                    continue
                if forced is None:
                    return True  # clause falsified
                if not assert_lit(forced):
                    return True
        return False


def check_rup(db: Formula | Iterable[Clause], clause: Iterable[Lit]) -> bool:
    """True iff asserting the negation of every literal of `clause` and
    running unit propagation on db yields a conflict."""
    clauses = db.copy_alive() if isinstance(db, Formula) else [make_clause(c) for c in db]
    target = make_clause(clause)
    return _RupDatabase(clauses).propagates_to_conflict([-l for l in target])


def verify(original: Formula | Iterable[Clause], trace: ProofTrace) -> Verdict:
    """Replay a trace against the original formula.

    Every Add must be RUP at its position, every Delete must name an alive
    clause, and a Verified trace must add the empty clause.
    """
    clauses = (
        original.copy_alive()
        if isinstance(original, Formula)
        else [make_clause(c) for c in original]
    )
    db = _RupDatabase(clauses)
    saw_empty = False
    for step, event in enumerate(trace):
        if event.kind == "add":
            if not db.propagates_to_conflict([-l for l in event.clause]):
                return Verdict(False, step, f"clause {list(event.clause)} is not RUP")
            db.add(event.clause)
            if not event.clause:
                saw_empty = True
        else:
            if not db.delete(event.clause):
                return Verdict(False, step, f"delete of absent clause {list(event.clause)}")
    if not saw_empty:
        return Verdict(False, len(trace.events), "no empty clause was added")
    return Verdict(True)


# -- brute-force oracle -------------------------------------------------------


def _var_masks(num_vars: int) -> list[int]:
    """mask[i] has bit b set iff assignment b makes variable i+1 true."""
    total = 1 << num_vars
    all_ones = (1 << total) - 1
    masks = []
    for i in range(num_vars):
        period = 1 << i
        block = ((1 << period) - 1) << period  # 'period' zeros then ones
        tile = all_ones // ((1 << (2 * period)) - 1)
        masks.append(block * tile)
    return masks


def _formula_mask(clauses: Iterable[Clause], num_vars: int) -> int:
    total = 1 << num_vars
    all_ones = (1 << total) - 1
    masks = _var_masks(num_vars)
    result = all_ones
    for clause in clauses:
        cm = 0
        for lit in clause:
            m = masks[abs(lit) - 1]
            cm |= m if lit > 0 else (~m & all_ones)
        result &= cm
        if not result:
            break
    return result


def _clauses_and_vars(f: Formula | Iterable[Clause]) -> tuple[list[Clause], int]:
    if isinstance(f, Formula):
        return f.copy_alive(), f.num_vars
    clauses = [make_clause(c) for c in f]
    num_vars = max((abs(l) for c in clauses for l in c), default=0)
    return clauses, num_vars


def brute_force_solve(f: Formula | Iterable[Clause]) -> tuple[str, Optional[dict[int, bool]]]:
    """Exhaustive enumeration; returns ("sat", model) with the
    lexicographically first model (False < True, variable 1 first), or
    ("unsat", None)."""
    clauses, num_vars = _clauses_and_vars(f)
    if num_vars > ORACLE_VAR_CAP:
        raise ValueError(f"{num_vars} variables exceed the oracle cap of {ORACLE_VAR_CAP}")
    sat_mask = _formula_mask(clauses, num_vars)
    if not sat_mask:
        return ("unsat", None)
    masks = _var_masks(num_vars)
    total = 1 << num_vars
    all_ones = (1 << total) - 1
    model: dict[int, bool] = {}
    for i in range(num_vars):
        m_false = sat_mask & (~masks[i] & all_ones)
        if m_false:
            sat_mask = m_false
            model[i + 1] = False
        else:
            sat_mask &= masks[i]
            model[i + 1] = True
    return ("sat", model)


def is_implicate(f: Formula | Iterable[Clause], clause: Iterable[Lit]) -> bool:
    """True iff f entails the clause (checked by exhaustive enumeration)."""
    clauses, num_vars = _clauses_and_vars(f)
    target = make_clause(clause)
    num_vars = max([num_vars] + [abs(l) for l in target])
    if num_vars > ORACLE_VAR_CAP:
        raise ValueError(f"{num_vars} variables exceed the oracle cap of {ORACLE_VAR_CAP}")
    with_negation = clauses + [make_clause([-l]) for l in target]
    return _formula_mask(with_negation, num_vars) == 0

"""Assignment trail and unit propagation via two watched literals.

The trail records (literal, reason, depth) entries; reason is None for an
assumption and the antecedent clause id for a propagation. Unit clauses are
lazy: they watch their single literal for falsification but are only
propagated when explicitly seeded (see seed_units), so a fresh trail makes
no top-level commitments on its own.
"""
from __future__ import annotations

from typing import Iterator, NamedTuple, Optional

from .cnf import Clause, Formula, Lit, make_clause


class TrailEntry(NamedTuple):
    lit: Lit
    reason: Optional[int]  # None = assumption, else antecedent clause id
    depth: int


class Engine:
    def __init__(self, formula: Formula):
        self.formula = formula
        self.watchers: dict[int, list[int]] = {}
        self.watched: dict[int, list[int]] = {}  # cid -> two watched literals
        self.assign: dict[int, bool] = {}
        self.pos: dict[int, int] = {}  # var -> trail index, for watch picking
        self.trail: list[TrailEntry] = []
        self.qhead = 0
        self.depth = 0
        self.propagations = 0
        for cid in formula.alive_ids():
            self.attach(cid)

    # -- assignment queries ------------------------------------------------

    def value(self, lit: Lit) -> Optional[bool]:
        v = self.assign.get(abs(lit))
        if v is None:
            return None
        return v == (lit > 0)

    def assigned_count(self) -> int:
        return len(self.assign)

    # -- trail manipulation ------------------------------------------------

    def reset(self) -> None:
        self.assign.clear()
        self.pos.clear()
        self.trail.clear()
        self.qhead = 0
        self.depth = 0

    def enqueue(self, lit: Lit, reason: Optional[int]) -> None:
        var = abs(lit)
        if var in self.assign:
            raise ValueError(f"variable {var} already assigned")
        self.assign[var] = lit > 0
        self.pos[var] = len(self.trail)
        self.trail.append(TrailEntry(lit, reason, self.depth))
        if reason is not None:
            self.propagations += 1

    def assume(self, lit: Lit) -> None:
        if abs(lit) in self.assign:
            raise ValueError(f"cannot assume {lit}: variable already assigned")
        self.depth += 1
        self.enqueue(lit, None)

    def backtrack_to(self, depth: int) -> None:
        if depth < 0 or depth > self.depth:
            raise ValueError(f"backtrack depth {depth} out of range 0..{self.depth}")
        while self.trail and self.trail[-1].depth > depth:
            entry = self.trail.pop()
            var = abs(entry.lit)
            del self.assign[var]
            del self.pos[var]
        self.depth = depth
        if self.qhead > len(self.trail):
            self.qhead = len(self.trail)

    def assumption_prefix_negation(self) -> Clause:
        """Negations of all assumption entries, as a canonical clause."""
        return make_clause(-e.lit for e in self.trail if e.reason is None)

    def assumptions(self) -> list[Lit]:
        return [e.lit for e in self.trail if e.reason is None]

    # -- clause attachment ---------------------------------------------------

    def attach(self, cid: int) -> tuple[str, Optional[Lit]]:
        """Register watches for clause cid under the current assignment.

        Returns ("ok", None), ("unit", forced_literal) or ("falsified", None).
        The caller decides whether a unit gets enqueued.
        """
        lits = self.formula.clause(cid)
        if not lits:
            return ("falsified", None)
        if len(lits) == 1:
            lit = lits[0]
            self.watched[cid] = [lit, lit]
            self.watchers.setdefault(lit, []).append(cid)
            v = self.value(lit)
            if v is False:
                return ("falsified", None)
            if v is None:
                return ("unit", lit)
            return ("ok", None)
        non_false = [l for l in lits if self.value(l) is not False]
        if len(non_false) >= 2:
            a, b = non_false[0], non_false[1]
            status, forced = "ok", None
        elif len(non_false) == 1:
            a = non_false[0]
            b = max(
                (l for l in lits if l != a),
                key=lambda l: self.pos[abs(l)],
            )
            if self.value(a) is None:
                status, forced = "unit", a
            else:
                status, forced = "ok", None
        else:
            ordered = sorted(lits, key=lambda l: self.pos[abs(l)], reverse=True)
            a, b = ordered[0], ordered[1]
            status, forced = "falsified", None
        self.watched[cid] = [a, b]
        self.watchers.setdefault(a, []).append(cid)
        self.watchers.setdefault(b, []).append(cid)
        return (status, forced)

    def seed_units(self) -> Optional[int]:
        """Enqueue every alive unit clause's literal; returns a conflicting
        clause id if two units contradict, else None."""
        for cid in self.formula.alive_ids():
            lits = self.formula.clause(cid)
            if not lits:
                return cid
            if len(lits) == 1:
                v = self.value(lits[0])
                if v is False:
                    return cid
                if v is None:
                    self.enqueue(lits[0], cid)
        return None

    # -- propagation ---------------------------------------------------------

    def propagate(self) -> Optional[int]:
        """FIFO unit propagation; returns the falsified clause id on conflict."""
        formula = self.formula
        value = self.value
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead].lit
            self.qhead += 1
            neg = -lit
            watching = self.watchers.get(neg)
            if not watching:
                continue
            kept: list[int] = []
            conflict: Optional[int] = None
            n = len(watching)
            for i in range(n):
                cid = watching[i]
                if not formula.is_alive(cid):
                    continue  # lazily drop deleted clauses
                pair = self.watched[cid]
                other = pair[0] if pair[1] == neg else pair[1]
                if other != neg and value(other) is True:
                    kept.append(cid)
                    continue
                repl = None
                for cand in formula.literals(cid):
                    if cand == neg or cand == other:
                        continue
                    if value(cand) is not False:
                        repl = cand
                        break
                if repl is not None:
                    if pair[0] == neg:
                        pair[0] = repl
                    else:
                        pair[1] = repl
                    self.watchers.setdefault(repl, []).append(cid)
                    continue
                kept.append(cid)
                if other == neg or value(other) is False:
                    conflict = cid
                    kept.extend(c for c in watching[i + 1:] if formula.is_alive(c))
                    break
                self.enqueue(other, cid)
            self.watchers[neg] = kept
            if conflict is not None:
                return conflict
        return None

    # -- debug checks ----------------------------------------------------------

    def check_fixpoint(self) -> None:
        """Assert no alive clause is falsified and no multi-literal clause is
        an unpropagated unit. Length-1 clauses may be dormant by design."""
        for cid in self.formula.alive_ids():
            lits = self.formula.clause(cid)
            vals = [self.value(l) for l in lits]
            assert not (lits and all(v is False for v in vals)), f"clause {cid} falsified"
            if len(lits) >= 2:
                free = [l for l, v in zip(lits, vals) if v is None]
                if len(free) == 1 and not any(v is True for v in vals):
                    raise AssertionError(f"clause {cid} is an unpropagated unit")

    def check_reasons(self) -> None:
        """Every propagated entry's antecedent was unit at insertion time."""
        seen: set[int] = set()
        for entry in self.trail:
            if entry.reason is not None:
                lits = self.formula.literals(entry.reason)
                assert entry.lit in lits
                for l in lits:
                    if l != entry.lit:
                        assert abs(l) in seen and self.value(l) is False
            seen.add(abs(entry.lit))

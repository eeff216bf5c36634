"""Clause and formula representation, DIMACS I/O, and subsumption primitives."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

Lit = int  # nonzero signed variable index; sign is polarity
Clause = tuple  # canonical tuple of Lit


class ClauseError(ValueError):
    pass


class TautologyError(ClauseError):
    pass


class DimacsError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def negate(lit: Lit) -> Lit:
    return -lit


def variable(lit: Lit) -> int:
    return abs(lit)


def make_clause(lits: Iterable[Lit]) -> Clause:
    """Canonical clause: deduplicated, sorted by (variable, polarity).

    Rejects tautologies; the empty clause is fine.
    """
    seen: set[int] = set()
    out: list[int] = []
    for lit in lits:
        lit = int(lit)
        if lit == 0:
            raise ClauseError("literal 0 is not allowed in a clause")
        if -lit in seen:
            raise TautologyError(f"clause contains both {lit} and {-lit}")
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    out.sort(key=lambda l: (abs(l), l > 0))
    return tuple(out)


def subsumes(a: Iterable[Lit], b: Iterable[Lit]) -> bool:
    """True iff every literal of a is a literal of b."""
    return set(a) <= set(b)


@dataclass
class SubsumptionResult:
    added: int  # id of the newly added clause
    deleted: list[int]  # ids tombstoned because the new clause subsumes them


class Formula:
    """Indexed clause database with stable ids, tombstone deletion and
    occurrence/unit bookkeeping.

    Ids are never reused within the lifetime of a Formula. Deleted clauses
    keep their literal storage so proof logging can still name them.
    """

    def __init__(self, num_vars: int = 0):
        self.num_vars = num_vars
        self._lits: list[Clause | None] = []
        self._sets: list[frozenset | None] = []
        self._alive: list[bool] = []
        self._transient: list[bool] = []
        self.alive_permanent = 0
        self.alive_transient = 0
        self.total_live_literals = 0  # permanent clauses only
        self._occ: dict[int, int] = {}  # literal -> occurrences in alive clauses
        self._unit_lits: dict[int, int] = {}  # literal -> alive unit clauses asserting it

    @property
    def next_id(self) -> int:
        return len(self._lits)

    def add_clause(self, lits: Iterable[Lit], transient: bool = False) -> int:
        clause = make_clause(lits)
        cid = len(self._lits)
        self._lits.append(clause)
        self._sets.append(frozenset(clause))
        self._alive.append(True)
        self._transient.append(transient)
        if transient:
            self.alive_transient += 1
        else:
            self.alive_permanent += 1
            self.total_live_literals += len(clause)
        for lit in clause:
            self._occ[lit] = self._occ.get(lit, 0) + 1
            if abs(lit) > self.num_vars:
                self.num_vars = abs(lit)
        if len(clause) == 1:
            self._unit_lits[clause[0]] = self._unit_lits.get(clause[0], 0) + 1
        return cid

    def delete_clause(self, cid: int) -> None:
        if not self._alive[cid]:
            raise ClauseError(f"clause {cid} is already deleted")
        self._alive[cid] = False
        clause = self._lits[cid]
        if self._transient[cid]:
            self.alive_transient -= 1
        else:
            self.alive_permanent -= 1
            self.total_live_literals -= len(clause)
        for lit in clause:
            self._occ[lit] -= 1
        if len(clause) == 1:
            self._unit_lits[clause[0]] -= 1

    def clause(self, cid: int) -> Clause:
        if not self._alive[cid]:
            raise ClauseError(f"clause {cid} is deleted")
        return self._lits[cid]

    def literals(self, cid: int) -> Clause:
        """Literal tuple regardless of alive flag (tombstones keep storage)."""
        return self._lits[cid]

    def literal_set(self, cid: int) -> frozenset:
        return self._sets[cid]

    def is_alive(self, cid: int) -> bool:
        return self._alive[cid]

    def is_transient(self, cid: int) -> bool:
        return self._transient[cid]

    def alive_ids(self) -> Iterator[int]:
        for cid, alive in enumerate(self._alive):
            if alive:
                yield cid

    def alive_clauses(self) -> Iterator[Clause]:
        for cid in self.alive_ids():
            yield self._lits[cid]

    def occurrences(self, lit: Lit) -> int:
        return self._occ.get(lit, 0)

    def unit_count(self, lit: Lit) -> int:
        """Number of alive unit clauses asserting lit."""
        return self._unit_lits.get(lit, 0)

    def compact(self) -> None:
        """Drop literal storage of tombstoned clauses; ids stay valid."""
        for cid, alive in enumerate(self._alive):
            if not alive:
                self._lits[cid] = ()
                self._sets[cid] = frozenset()

    def copy_alive(self) -> list[Clause]:
        return list(self.alive_clauses())


def apply_subsumption(formula: Formula, learned: Iterable[Lit]) -> SubsumptionResult:
    """Add `learned`, deleting every alive clause whose literal set contains it.

    Returns the new id plus the deleted ids. Tautologies are rejected.
    """
    clause = make_clause(learned)
    cset = set(clause)
    deleted = [
        cid
        for cid in formula.alive_ids()
        if cset <= formula.literal_set(cid)
    ]
    for cid in deleted:
        formula.delete_clause(cid)
    added = formula.add_clause(clause)
    return SubsumptionResult(added=added, deleted=deleted)


def parse_dimacs(text: str) -> tuple[Formula, list[str]]:
    """Parse DIMACS CNF. Returns (formula, warnings).

    Tolerates '%' end markers and blank lines; tautological clauses are
    dropped with a warning; variables beyond the header grow the count with
    a warning.
    """
    declared_vars: int | None = None
    declared_clauses: int | None = None
    warnings: list[str] = []
    clauses: list[list[int]] = []
    pending: list[int] = []
    ended = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            ended = True
            continue
        if ended:
            continue
        if line.startswith("p"):
            if declared_vars is not None:
                raise DimacsError("duplicate header", lineno)
            fields = line.split()
            if len(fields) != 4 or fields[1] != "cnf":
                raise DimacsError(f"malformed header {line!r}", lineno)
            try:
                declared_vars = int(fields[2])
                declared_clauses = int(fields[3])
            except ValueError:
                raise DimacsError(f"malformed header {line!r}", lineno) from None
            if declared_vars < 0 or declared_clauses < 0:
                raise DimacsError(f"malformed header {line!r}", lineno)
            continue
        if declared_vars is None:
            raise DimacsError(f"clause before header: {line!r}", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"non-integer token {tok!r}", lineno) from None
            if lit == 0:
                clauses.append(pending)
                pending = []
            else:
                pending.append(lit)
    if pending:
        raise DimacsError("unterminated clause at end of input")
    if declared_vars is None:
        raise DimacsError("missing 'p cnf' header")

    formula = Formula(num_vars=declared_vars)
    dropped_tautologies = 0
    max_var = 0
    for lits in clauses:
        if lits:
            max_var = max(max_var, max(abs(l) for l in lits))
        try:
            formula.add_clause(lits)
        except TautologyError:
            dropped_tautologies += 1
    if dropped_tautologies:
        warnings.append(f"dropped {dropped_tautologies} tautological clause(s)")
    if max_var > declared_vars:
        warnings.append(
            f"header declares {declared_vars} variables but {max_var} appear; using {max_var}"
        )
    formula.num_vars = max(declared_vars, max_var)
    if declared_clauses is not None and len(clauses) != declared_clauses:
        warnings.append(
            f"header declares {declared_clauses} clauses but {len(clauses)} were read"
        )
    return formula, warnings


def write_dimacs(formula: Formula) -> str:
    lines = [f"p cnf {formula.num_vars} {formula.alive_permanent + formula.alive_transient}"]
    for clause in formula.alive_clauses():
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"

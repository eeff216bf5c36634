"""Or-type pebbling formula generation over acyclic graphs, the pyramid
instance family, and the stage-by-stage refutation plan.

Each vertex carries k output variables shared by all its out-arcs. Sources
assert the disjunction of their variables, the sink negates its inputs, and
an internal vertex with inputs x_1..x_n and outputs y encodes that if every
input group has a true variable then some output variable is true.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .cnf import Clause, Formula, Lit, make_clause


class PebblingError(ValueError):
    pass


class UnsupportedFeatureError(PebblingError):
    pass


@dataclass
class Vertex:
    id: str
    kind: str  # "source" | "internal" | "sink"
    preds: list[str] = field(default_factory=list)


@dataclass
class PebblingDag:
    arity: int
    vertices: list[Vertex]

    def validate(self) -> None:
        if self.arity < 1:
            raise PebblingError("arity must be >= 1")
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise PebblingError("duplicate vertex ids")
        by_id = {v.id: v for v in self.vertices}
        sinks = [v for v in self.vertices if v.kind == "sink"]
        if len(sinks) != 1:
            raise PebblingError("exactly one sink vertex is required")
        sink = sinks[0]
        if len(sink.preds) != 1:
            raise PebblingError("the sink must have exactly one in-arc")
        if by_id[sink.preds[0]].kind != "internal":
            raise PebblingError("the sink must be fed by an internal vertex")
        for v in self.vertices:
            if v.kind == "source" and v.preds:
                raise PebblingError(f"source {v.id} must not have predecessors")
            if v.kind == "internal" and not v.preds:
                raise PebblingError(f"internal vertex {v.id} needs at least one in-arc")
            for p in v.preds:
                if p not in by_id:
                    raise PebblingError(f"unknown predecessor {p!r} of {v.id}")
                if by_id[p].kind == "sink":
                    raise PebblingError("the sink cannot feed other vertices")
        self.toposort()  # raises on cycles

    def toposort(self) -> list[Vertex]:
        by_id = {v.id: v for v in self.vertices}
        state: dict[str, int] = {}
        order: list[Vertex] = []

        def visit(vid: str, stack: tuple = ()) -> None:
            if state.get(vid) == 2:
                return
            if state.get(vid) == 1:
                raise PebblingError(f"cycle involving {vid!r}")
            state[vid] = 1
            for p in by_id[vid].preds:
                visit(p)
            state[vid] = 2
            order.append(by_id[vid])

        for v in self.vertices:
            visit(v.id)
        return order


@dataclass
class PlanStep:
    target: Clause
    dropped: Lit
    assumptions: list[Lit]
    produces: Clause


@dataclass
class PebblingInstance:
    dag: PebblingDag
    formula: Formula
    vertex_clauses: dict[str, list[int]]
    out_vars: dict[str, list[int]]  # vertex id -> output variables
    var_names: dict[int, tuple[str, int]]  # variable -> (vertex, position)

    def sidecar(self) -> dict:
        return {
            "arity": self.dag.arity,
            "vertices": [
                {"id": v.id, "kind": v.kind, "preds": list(v.preds)}
                for v in self.dag.vertices
            ],
            "variables": {
                str(var): {"vertex": vtx, "position": pos}
                for var, (vtx, pos) in sorted(self.var_names.items())
            },
            "stage_plan_length": len(stage_plan(self)),
        }


def implication_clauses(in_vars: list[list[int]], out_vars: list[int]) -> list[Clause]:
    """Clause set stating that if every input group has a true variable then
    some output variable is true: one clause per choice of a negated variable
    from each group, appended to the output disjunction."""
    groups = [list(g) for g in in_vars]
    k = len(out_vars)
    if k < 1:
        raise PebblingError("at least one output variable is required")
    if any(len(g) != k for g in groups):
        raise PebblingError("every input group must match the output arity")
    all_vars = [v for g in groups for v in g] + list(out_vars)
    if len(set(all_vars)) != len(all_vars):
        raise PebblingError("variable lists must be disjoint")

    clauses: list[tuple] = [tuple(out_vars)]
    for group in groups:
        clauses = [(-x,) + c for x in group for c in clauses]
    return [make_clause(c) for c in clauses]


def generate(dag: PebblingDag) -> PebblingInstance:
    dag.validate()
    order = dag.toposort()
    k = dag.arity
    out_vars: dict[str, list[int]] = {}
    var_names: dict[int, tuple[str, int]] = {}
    next_var = 1
    for v in order:
        if v.kind == "sink":
            continue
        out_vars[v.id] = list(range(next_var, next_var + k))
        for pos, var in enumerate(out_vars[v.id]):
            var_names[var] = (v.id, pos)
        next_var += k
    formula = Formula(num_vars=next_var - 1)
    vertex_clauses: dict[str, list[int]] = {}
    for v in order:
        ids: list[int] = []
        if v.kind == "source":
            ids.append(formula.add_clause(out_vars[v.id]))
        elif v.kind == "internal":
            groups = [out_vars[p] for p in v.preds]
            for clause in implication_clauses(groups, out_vars[v.id]):
                ids.append(formula.add_clause(clause))
        else:  # sink
            for var in out_vars[v.preds[0]]:
                ids.append(formula.add_clause([-var]))
        vertex_clauses[v.id] = ids
    return PebblingInstance(
        dag=dag,
        formula=formula,
        vertex_clauses=vertex_clauses,
        out_vars=out_vars,
        var_names=var_names,
    )


def pyramid(rows: int, arity: int) -> PebblingDag:
    """Pyramidal graph: `rows` sources on the bottom row, each higher row one
    vertex fewer fed by the two adjacent vertices below, apex feeding the sink."""
    if rows < 2:
        raise PebblingError("a pyramid needs at least 2 rows")
    if arity < 1:
        raise PebblingError("arity must be >= 1")
    vertices: list[Vertex] = []
    below: list[str] = []
    for r in range(rows, 0, -1):
        current: list[str] = []
        for i in range(r):
            vid = f"v{rows - r}_{i}"
            if r == rows:
                vertices.append(Vertex(vid, "source"))
            else:
                vertices.append(Vertex(vid, "internal", [below[i], below[i + 1]]))
            current.append(vid)
        below = current
    vertices.append(Vertex("sink", "sink", [below[0]]))
    return PebblingDag(arity=arity, vertices=vertices)


def stage_plan(inst: PebblingInstance) -> list[PlanStep]:
    """Refutation schedule: internal vertices in topological order; for each,
    peel input groups first to last, producing every clause of the remaining
    implication structure from a single assumption sequence."""
    k = inst.dag.arity
    steps: list[PlanStep] = []
    for v in inst.dag.toposort():
        if v.kind != "internal":
            continue
        groups = [inst.out_vars[p] for p in v.preds]
        outs = inst.out_vars[v.id]
        for p, group in enumerate(groups):
            remaining = groups[p + 1:]
            for produced in implication_clauses(remaining, outs):
                target = make_clause((-group[0],) + tuple(produced))
                positives = sorted(l for l in produced if l > 0)
                negatives = sorted((l for l in produced if l < 0), key=abs)
                assumptions = [-l for l in positives] + [-l for l in negatives]
                steps.append(
                    PlanStep(
                        target=target,
                        dropped=-group[0],
                        assumptions=assumptions,
                        produces=produced,
                    )
                )
    return steps


def dag_from_json(data: str | dict) -> PebblingDag:
    obj = json.loads(data) if isinstance(data, str) else data
    if not isinstance(obj, dict):
        raise PebblingError("DAG JSON must be an object")
    if "arity" not in obj or "vertices" not in obj:
        raise PebblingError("DAG JSON needs 'arity' and 'vertices'")
    vertices = []
    for entry in obj["vertices"]:
        kind = entry.get("kind")
        if kind not in ("source", "internal", "sink"):
            raise PebblingError(f"bad vertex kind {kind!r}")
        vertices.append(Vertex(entry["id"], kind, list(entry.get("preds", []))))
    dag = PebblingDag(arity=int(obj["arity"]), vertices=vertices)
    dag.validate()
    return dag

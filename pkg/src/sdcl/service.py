"""HTTP service wrapping the solver, generator, verifier and benchmark.

The CLI and this service call the same core functions; the service is the
long-running multi-client front end, exchanging DIMACS and proof text in
JSON bodies.
"""
from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .cnf import DimacsError, parse_dimacs, write_dimacs
from .pebbling import PebblingError, dag_from_json, generate, pyramid
from .proof import ProofTrace, verify
from .solver import Solver, SolverConfig

app = FastAPI(title="sdcl-sat", version="0.1.0")


class SolveRequest(BaseModel):
    dimacs: str
    strategy: str = "sdcl"
    seed: int = 0
    budget_conflicts: int = 64
    max_seconds: Optional[float] = None


class SolveResponse(BaseModel):
    result: str  # SAT | UNSAT | UNKNOWN
    model: Optional[list[int]] = None
    proof: Optional[str] = None
    stats: dict
    warnings: list[str] = Field(default_factory=list)


class GenerateRequest(BaseModel):
    shape: str = "pyramid"
    rows: int = 3
    arity: int = 2
    type: str = "or"
    dag: Optional[dict] = None


class GenerateResponse(BaseModel):
    dimacs: str
    num_vars: int
    num_clauses: int
    sidecar: dict


class VerifyRequest(BaseModel):
    dimacs: str
    proof: str


class VerifyResponse(BaseModel):
    verdict: str  # VERIFIED | REJECTED
    step: Optional[int] = None
    reason: Optional[str] = None


class BenchRequest(BaseModel):
    shape: str = "pyramid"
    rows_from: int = 3
    rows_to: int = 6
    arity: int = 2
    strategy: str = "sdcl"
    seed: int = 0


class BenchRow(BaseModel):
    instance: str
    vars: int
    clauses: int
    result: str
    wall_ms: float
    stats: dict


class BenchResponse(BaseModel):
    rows: list[BenchRow]


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/solve", response_model=SolveResponse)
def solve(req: SolveRequest) -> SolveResponse:
    try:
        formula, warnings = parse_dimacs(req.dimacs)
        config = SolverConfig(
            strategy=req.strategy,
            seed=req.seed,
            initial_conflict_budget=req.budget_conflicts,
            max_seconds=req.max_seconds,
        )
    except (DimacsError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    solver = Solver(formula, config)
    outcome = solver.solve()
    result = {"sat": "SAT", "unsat": "UNSAT", "unknown": "UNKNOWN"}[outcome.status]
    model = None
    proof = None
    if outcome.status == "sat":
        model = [v if outcome.model.get(v, False) else -v for v in sorted(outcome.model)]
    if outcome.status == "unsat":
        proof = outcome.proof.to_text()
    stats = outcome.stats.as_row()
    stats["wall_ms"] = round(outcome.stats.wall_time * 1000.0, 3)
    return SolveResponse(result=result, model=model, proof=proof, stats=stats, warnings=warnings)


@app.post("/generate", response_model=GenerateResponse)
def generate_instance(req: GenerateRequest) -> GenerateResponse:
    if req.type != "or":
        raise HTTPException(status_code=422, detail=f"unsupported pebbling type {req.type!r}")
    try:
        if req.dag is not None:
            dag = dag_from_json(req.dag)
        elif req.shape == "pyramid":
            dag = pyramid(req.rows, req.arity)
        else:
            raise HTTPException(status_code=422, detail=f"unsupported shape {req.shape!r}")
        instance = generate(dag)
    except PebblingError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return GenerateResponse(
        dimacs=write_dimacs(instance.formula),
        num_vars=instance.formula.num_vars,
        num_clauses=instance.formula.alive_permanent,
        sidecar=instance.sidecar(),
    )


@app.post("/verify", response_model=VerifyResponse)
def verify_proof(req: VerifyRequest) -> VerifyResponse:
    try:
        formula, _ = parse_dimacs(req.dimacs)
        trace = ProofTrace.from_text(req.proof)
    except (DimacsError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    verdict = verify(formula, trace)
    if verdict.ok:
        return VerifyResponse(verdict="VERIFIED")
    return VerifyResponse(verdict="REJECTED", step=verdict.step, reason=verdict.reason)


@app.post("/bench", response_model=BenchResponse)
def bench(req: BenchRequest) -> BenchResponse:
    if req.shape != "pyramid":
        raise HTTPException(status_code=422, detail=f"unsupported shape {req.shape!r}")
    if req.rows_from < 2 or req.rows_to < req.rows_from:
        raise HTTPException(status_code=422, detail="need 2 <= rows_from <= rows_to")
    rows: list[BenchRow] = []
    for r in range(req.rows_from, req.rows_to + 1):
        instance = generate(pyramid(r, req.arity))
        solver = Solver(
            instance.formula,
            SolverConfig(strategy=req.strategy, seed=req.seed),
        )
        outcome = solver.solve()
        if outcome.status == "unsat":
            verdict = verify(solver.original_clauses, outcome.proof)
            if not verdict.ok:
                raise HTTPException(
                    status_code=500,
                    detail=f"proof of pyramid rows={r} rejected: {verdict.reason}",
                )
        rows.append(
            BenchRow(
                instance=f"pyramid_r{r}_k{req.arity}",
                vars=instance.formula.num_vars,
                clauses=len(solver.original_clauses),
                result={"sat": "SAT", "unsat": "UNSAT", "unknown": "UNKNOWN"}[outcome.status],
                wall_ms=round(outcome.stats.wall_time * 1000.0, 3),
                stats=outcome.stats.as_row(),
            )
        )
    return BenchResponse(rows=rows)

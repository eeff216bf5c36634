"""Command-line front end: solve, gen, verify, bench, and serve.

Output follows SAT-competition conventions: "s SATISFIABLE"/"s UNSATISFIABLE"
with exit codes 10/20, "s UNKNOWN" with exit 0. File or argument errors exit
1 (2 for gen/verify argument problems), and a failed proof check aborts a
benchmark with exit 3.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path
from typing import Optional

from .cnf import DimacsError, Formula, parse_dimacs, write_dimacs
from .pebbling import PebblingError, dag_from_json, generate, pyramid
from .proof import ProofTrace, verify
from .solver import Outcome, Solver, SolverConfig

CSV_COLUMNS = [
    "instance",
    "vars",
    "clauses",
    "decisions",
    "propagations",
    "conflicts",
    "superficial_attempts",
    "superficial_successes",
    "advanced_attempts",
    "advanced_successes",
    "learned_permanent",
    "learned_transient",
    "deleted_subsumed",
    "peak_permanent_clauses",
    "restarts",
    "result",
    "wall_ms",
]


def _result_tag(outcome: Outcome) -> str:
    return {"sat": "SAT", "unsat": "UNSAT", "unknown": "UNKNOWN"}[outcome.status]


def run_record(instance: str, num_vars: int, num_clauses: int, outcome: Outcome) -> dict:
    row = {
        "instance": instance,
        "vars": num_vars,
        "clauses": num_clauses,
        "result": _result_tag(outcome),
        "wall_ms": round(outcome.stats.wall_time * 1000.0, 3),
    }
    row.update(outcome.stats.as_row())
    return row


def append_csv_row(path: str, row: dict) -> None:
    target = Path(path)
    new_file = not target.exists() or target.stat().st_size == 0
    with target.open("a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        if new_file:
            writer.writeheader()
        writer.writerow(row)


def _config_from_args(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        seed=args.seed,
        initial_conflict_budget=args.budget_conflicts,
        max_seconds=args.max_seconds,
        strategy=args.strategy,
    )


def _print_model(model: dict[int, bool], out) -> None:
    lits = [v if model.get(v, False) else -v for v in sorted(model)]
    for i in range(0, len(lits), 10):
        chunk = lits[i:i + 10]
        end = " 0" if i + 10 >= len(lits) else ""
        print("v " + " ".join(str(l) for l in chunk) + end, file=out)
    if not lits:
        print("v 0", file=out)


def cmd_solve(args: argparse.Namespace, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        text = Path(args.path).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return 1
    try:
        formula, warnings = parse_dimacs(text)
    except DimacsError as exc:
        print(f"error: {exc}", file=err)
        return 1
    for w in warnings:
        print(f"c warning: {w}", file=out)
    num_vars, num_clauses = formula.num_vars, formula.alive_permanent
    solver = Solver(formula, _config_from_args(args))
    outcome = solver.solve()
    if args.stats:
        append_csv_row(args.stats, run_record(Path(args.path).name, num_vars, num_clauses, outcome))
    if outcome.status == "sat":
        print("s SATISFIABLE", file=out)
        _print_model(outcome.model or {}, out)
        return 10
    if outcome.status == "unsat":
        print("s UNSATISFIABLE", file=out)
        if args.proof:
            Path(args.proof).write_text(outcome.proof.to_text())
        return 20
    print("s UNKNOWN", file=out)
    return 0


def cmd_gen(args: argparse.Namespace, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    if args.type != "or":
        print(f"error: unsupported pebbling type {args.type!r} (only or-type is implemented)", file=err)
        return 2
    try:
        if args.from_file:
            dag = dag_from_json(Path(args.from_file).read_text())
        else:
            if args.shape != "pyramid":
                print(f"error: unsupported shape {args.shape!r}", file=err)
                return 2
            dag = pyramid(args.rows, args.arity)
        instance = generate(dag)
    except (PebblingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    dimacs = write_dimacs(instance.formula)
    if args.output:
        Path(args.output).write_text(dimacs)
        sidecar = Path(args.output).with_suffix(Path(args.output).suffix + ".peb.json")
        sidecar.write_text(json.dumps(instance.sidecar(), indent=2) + "\n")
        print(f"wrote {args.output} and {sidecar.name}", file=out)
    else:
        out.write(dimacs)
    print(
        f"c pebbling instance: {instance.formula.num_vars} variables, "
        f"{instance.formula.alive_permanent} clauses",
        file=out,
    )
    return 0


def cmd_verify(args: argparse.Namespace, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        formula, _ = parse_dimacs(Path(args.cnf).read_text())
        trace = ProofTrace.from_text(Path(args.proof).read_text())
    except (OSError, DimacsError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    verdict = verify(formula, trace)
    if verdict.ok:
        print("VERIFIED", file=out)
        return 0
    print(f"REJECTED step {verdict.step}: {verdict.reason}", file=out)
    return 1


def cmd_bench(args: argparse.Namespace, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    if args.shape != "pyramid":
        print(f"error: unsupported shape {args.shape!r}", file=err)
        return 2
    if args.rows_from < 2 or args.rows_to < args.rows_from:
        print("error: need 2 <= rows-from <= rows-to", file=err)
        return 2
    for rows in range(args.rows_from, args.rows_to + 1):
        try:
            instance = generate(pyramid(rows, args.arity))
        except PebblingError as exc:
            print(f"error: {exc}", file=err)
            return 2
        name = f"pyramid_r{rows}_k{args.arity}"
        solver = Solver(instance.formula, _config_from_args(args))
        num_vars, num_clauses = instance.formula.num_vars, instance.formula.alive_permanent
        outcome = solver.solve()
        if outcome.status == "unsat":
            verdict = verify(solver.original_clauses, outcome.proof)
            if not verdict.ok:
                print(
                    f"error: proof of {name} rejected at step {verdict.step}: {verdict.reason}",
                    file=err,
                )
                return 3
        append_csv_row(args.csv, run_record(name, num_vars, num_clauses, outcome))
        print(
            f"{name}: {_result_tag(outcome)} in {outcome.stats.wall_time * 1000.0:.1f} ms",
            file=out,
        )
    return 0


def cmd_serve(args: argparse.Namespace, out=None, err=None) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdcl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve a DIMACS CNF file")
    solve.add_argument("path")
    solve.add_argument("--strategy", choices=["sdcl", "dpll"], default="sdcl")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--budget-conflicts", type=int, default=64)
    solve.add_argument("--max-seconds", type=float, default=None)
    solve.add_argument("--proof", help="write the refutation trace here (unsat only)")
    solve.add_argument("--stats", help="append one CSV row of run statistics here")
    solve.set_defaults(func=cmd_solve)

    gen = sub.add_parser("gen", help="generate a pebbling instance")
    gen.add_argument("--shape", default="pyramid")
    gen.add_argument("--rows", type=int, default=3)
    gen.add_argument("--arity", type=int, default=2)
    gen.add_argument("--type", choices=["or", "xor"], default="or")
    gen.add_argument("--from", dest="from_file", help="JSON DAG description")
    gen.add_argument("-o", "--output")
    gen.set_defaults(func=cmd_gen)

    ver = sub.add_parser("verify", help="check a proof trace against a CNF file")
    ver.add_argument("cnf")
    ver.add_argument("proof")
    ver.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="generate, solve and verify a pyramid series")
    bench.add_argument("--shape", default="pyramid")
    bench.add_argument("--rows-from", type=int, required=True)
    bench.add_argument("--rows-to", type=int, required=True)
    bench.add_argument("--arity", type=int, default=2)
    bench.add_argument("--csv", required=True)
    bench.add_argument("--strategy", choices=["sdcl", "dpll"], default="sdcl")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--budget-conflicts", type=int, default=64)
    bench.add_argument("--max-seconds", type=float, default=None)
    bench.set_defaults(func=cmd_bench)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

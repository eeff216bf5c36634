from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from sdcl.cnf import write_dimacs
from sdcl.pebbling import generate, pyramid
from sdcl.proof import ProofTrace, verify
from sdcl.cnf import parse_dimacs
from sdcl.service import app
from conftest import PAIR_FORCING_CLAUSES, formula_from


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_solve_sat(client):
    dimacs = write_dimacs(formula_from(PAIR_FORCING_CLAUSES, 6))
    resp = client.post("/solve", json={"dimacs": dimacs})
    assert resp.status_code == 200
    body = resp.json()
    assert body["result"] == "SAT"
    model = {abs(l): l > 0 for l in body["model"]}
    for clause in PAIR_FORCING_CLAUSES:
        assert any(model[abs(l)] == (l > 0) for l in clause)


def test_solve_unsat_proof_round_trip(client):
    dimacs = write_dimacs(generate(pyramid(3, 2)).formula)
    resp = client.post("/solve", json={"dimacs": dimacs, "seed": 1})
    body = resp.json()
    assert body["result"] == "UNSAT"
    assert body["stats"]["learned_permanent"] == 10
    formula, _ = parse_dimacs(dimacs)
    assert verify(formula, ProofTrace.from_text(body["proof"])).ok
    check = client.post("/verify", json={"dimacs": dimacs, "proof": body["proof"]})
    assert check.json()["verdict"] == "VERIFIED"


def test_solve_rejects_bad_dimacs(client):
    resp = client.post("/solve", json={"dimacs": "p cnf x\n"})
    assert resp.status_code == 422


def test_generate_pyramid(client):
    resp = client.post("/generate", json={"shape": "pyramid", "rows": 3, "arity": 2})
    body = resp.json()
    assert resp.status_code == 200
    assert body["num_vars"] == 12
    assert body["num_clauses"] == 17
    assert body["sidecar"]["stage_plan_length"] == 9
    assert body["dimacs"].startswith("p cnf 12 17")


def test_generate_rejects_xor(client):
    resp = client.post("/generate", json={"type": "xor"})
    assert resp.status_code == 422


def test_generate_from_dag(client):
    dag = {
        "arity": 1,
        "vertices": [
            {"id": "s", "kind": "source", "preds": []},
            {"id": "m", "kind": "internal", "preds": ["s"]},
            {"id": "t", "kind": "sink", "preds": ["m"]},
        ],
    }
    resp = client.post("/generate", json={"dag": dag})
    assert resp.status_code == 200
    assert resp.json()["num_clauses"] == 3


def test_verify_rejects_mutated_proof(client):
    dimacs = write_dimacs(generate(pyramid(3, 2)).formula)
    proof = client.post("/solve", json={"dimacs": dimacs}).json()["proof"]
    lines = proof.splitlines()
    first = lines[0].split()
    first[0] = str(-int(first[0]))
    lines[0] = " ".join(first)
    resp = client.post("/verify", json={"dimacs": dimacs, "proof": "\n".join(lines)})
    body = resp.json()
    assert body["verdict"] == "REJECTED"
    assert body["step"] is not None


def test_bench_rows(client):
    resp = client.post("/bench", json={"rows_from": 3, "rows_to": 5, "arity": 2})
    assert resp.status_code == 200
    rows = resp.json()["rows"]
    assert [r["instance"] for r in rows] == [
        "pyramid_r3_k2", "pyramid_r4_k2", "pyramid_r5_k2",
    ]
    assert all(r["result"] == "UNSAT" for r in rows)

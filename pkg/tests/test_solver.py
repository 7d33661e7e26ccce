import os
import random
import sys

import pytest

from c3dsm import cnf
from c3dsm.solver import (SAT, UNKNOWN, UNSAT, ExternalSolverError,
                          SolveResult, SolveStats, parse_model_literals,
                          solve, solve_external, verify_model)
from tt_oracle import random_formula, truth_table_sat

SRC = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src")
CLI_SOLVER = f"{sys.executable} -m c3dsm.cli solve {{file}}"


@pytest.fixture
def cli_env(monkeypatch):
    monkeypatch.setenv("PYTHONPATH", SRC + os.pathsep + os.environ.get("PYTHONPATH", ""))


# ----------------------------------------------------------------- embedded

def test_single_clause_with_assumptions():
    res = solve((1, [[1]]), assumptions=[-1])
    assert res.verdict == UNSAT
    res = solve((1, [[1]]), assumptions=[1])
    assert res.verdict == SAT and res.model[1] is True


def test_empty_clause_is_unsat():
    assert solve((2, [[1], []])).verdict == UNSAT


def test_inconsistent_assumptions_rejected():
    with pytest.raises(ValueError):
        solve((2, [[1, 2]]), assumptions=[1, -1])
    with pytest.raises(ValueError):
        solve((2, [[1, 2]]), assumptions=[5])


def test_result_invariant():
    with pytest.raises(ValueError):
        SolveResult(UNSAT, model=[False, True])
    with pytest.raises(ValueError):
        SolveResult(SAT, model=None)


def test_budget_exhaustion_returns_unknown():
    f = cnf.build_f(3, True)
    res = solve(f, max_conflicts=1)
    assert res.verdict == UNKNOWN and res.model is None


def test_f3_unsat():
    res = solve(cnf.build_f(3, True))
    assert res.verdict == UNSAT


def test_f3_prime_unsat():
    res = solve(cnf.build_f_prime(3, True))
    assert res.verdict == UNSAT


def test_solver_deterministic():
    f = cnf.build_f(3, True)
    a = solve(f)
    b = solve(f)
    assert (a.verdict, a.stats.conflicts, a.stats.decisions) == \
           (b.verdict, b.stats.conflicts, b.stats.decisions)


def test_solve_does_not_mutate_formula():
    f = cnf.build_f(3, True)
    before = [list(cl) for cl in f.clauses]
    solve(f)
    assert f.clauses == before


def test_pigeonhole_exercises_learning_and_reduction():
    # 8 pigeons, 7 holes: UNSAT by construction, hard enough to force
    # thousands of conflicts and at least one learned-clause reduction
    holes = 7
    pigeons = holes + 1
    var = lambda p, h: p * holes + h + 1
    clauses = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p1 in range(pigeons):
            for p2 in range(p1 + 1, pigeons):
                clauses.append([-var(p1, h), -var(p2, h)])
    res = solve((pigeons * holes, clauses), max_seconds=60)
    assert res.verdict == UNSAT
    assert res.stats.conflicts > 2000
    assert res.stats.reductions >= 1
    assert res.stats.restarts >= 1


def test_agreement_with_truth_table_oracle():
    rng = random.Random(1234)
    for _ in range(120):
        v, clauses = random_formula(rng)
        res = solve((v, clauses))
        assert res.verdict in (SAT, UNSAT)
        assert (res.verdict == SAT) == truth_table_sat(v, clauses)
        if res.verdict == SAT:
            assert verify_model((v, clauses), res.model)


def test_assumptions_equal_added_units():
    rng = random.Random(77)
    for _ in range(60):
        v, clauses = random_formula(rng, max_vars=10)
        lits = rng.sample(range(1, v + 1), min(v, 2))
        asm = [l if rng.random() < 0.5 else -l for l in lits]
        by_assume = solve((v, clauses), assumptions=asm)
        by_units = solve((v, clauses + [[l] for l in asm]))
        assert by_assume.verdict == by_units.verdict


# -------------------------------------------------------------- verify_model

def test_verify_model_basics():
    f = (2, [[1, 2], [-1, 2]])
    assert verify_model(f, [None, True, True])
    assert not verify_model(f, [None, True, False])
    with pytest.raises(ValueError):
        verify_model(f, [None, True, None])
    assert verify_model(f, {1: False, 2: True})


def test_verify_model_detects_single_flip():
    rng = random.Random(3)
    flips_detected = 0
    for _ in range(50):
        v, clauses = random_formula(rng, max_vars=8)
        res = solve((v, clauses))
        if res.verdict != SAT:
            continue
        var = rng.randint(1, v)
        flipped = list(res.model)
        flipped[var] = not flipped[var]
        depends = any(var in map(abs, cl) for cl in clauses)
        if not verify_model((v, clauses), flipped):
            flips_detected += 1
            assert depends
    assert flips_detected > 0


# ------------------------------------------------------------ model parsing

def test_parse_model_literals():
    text = "c comment\ns SATISFIABLE\nv 1 -2\nv 3 0\nv 9 9\n"
    assert parse_model_literals(text) == [1, -2, 3]
    assert parse_model_literals("1 -2 0") == [1, -2]
    with pytest.raises(ExternalSolverError):
        parse_model_literals("v 1 junk 0")


# ----------------------------------------------------------------- external

def _write_cnf(tmp_path, name, formula):
    path = tmp_path / name
    with open(path, "w", newline="\n") as fp:
        cnf.write_dimacs(formula, fp)
    return str(path)


def test_external_requires_placeholder(tmp_path):
    with pytest.raises(ValueError):
        solve_external("x.cnf", "solver without placeholder")


def test_external_spawn_failure(tmp_path):
    path = _write_cnf(tmp_path, "t.cnf", cnf.CnfFormula(1, [[1]]))
    with pytest.raises(ExternalSolverError):
        solve_external(path, "/nonexistent/solver/binary {file}")


def test_external_unsat_and_sat(tmp_path, cli_env):
    f3 = _write_cnf(tmp_path, "f3.cnf", cnf.build_f(3, True))
    res = solve_external(f3, CLI_SOLVER)
    assert res.verdict == UNSAT

    tiny = _write_cnf(tmp_path, "tiny.cnf", cnf.CnfFormula(2, [[1, 2], [-1, 2]]))
    res = solve_external(tiny, CLI_SOLVER)
    assert res.verdict == SAT
    assert res.model[2] is True
    assert verify_model(cnf.CnfFormula(2, [[1, 2], [-1, 2]]), res.model)


def test_external_timeout_zero(tmp_path, cli_env):
    path = _write_cnf(tmp_path, "t.cnf", cnf.CnfFormula(1, [[1]]))
    res = solve_external(path, CLI_SOLVER, timeout=0)
    assert res.verdict == UNKNOWN


def test_external_no_verdict_line(tmp_path):
    path = _write_cnf(tmp_path, "t.cnf", cnf.CnfFormula(1, [[1]]))
    res = solve_external(path, f"{sys.executable} -c \"print('hello {{file}}')\"")
    assert res.verdict == UNKNOWN
    assert "hello" in res.output


def test_external_sat_without_model_rejected(tmp_path):
    path = _write_cnf(tmp_path, "t.cnf", cnf.CnfFormula(1, [[1]]))
    with pytest.raises(ExternalSolverError):
        solve_external(path, f"{sys.executable} -c \"print('s SATISFIABLE'); _='{{file}}'\"")


def test_external_lying_model_rejected(tmp_path):
    path = _write_cnf(tmp_path, "t.cnf", cnf.CnfFormula(1, [[1]]))
    cmd = f"{sys.executable} -c \"print('s SATISFIABLE'); print('v -1 0'); _='{{file}}'\""
    with pytest.raises(ExternalSolverError):
        solve_external(path, cmd)


def test_external_agrees_with_embedded_on_random_cnfs(tmp_path, cli_env):
    rng = random.Random(4096)
    for i in range(200):
        v, clauses = random_formula(rng, max_vars=8)
        f = cnf.CnfFormula(v, clauses)
        path = _write_cnf(tmp_path, f"r{i}.cnf", f)
        internal = solve(f)
        external = solve_external(path, CLI_SOLVER)
        assert internal.verdict == external.verdict
        if external.verdict == SAT:
            assert verify_model(f, external.model)

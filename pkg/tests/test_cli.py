import io
import json
import sys

import pytest

from compatsat.cli import main
from compatsat.formula import parse_dimacs


@pytest.fixture
def run(monkeypatch, capsys):
    def _run(argv, stdin=""):
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
        code = main(argv)
        captured = capsys.readouterr()
        return code, captured.out, captured.err
    return _run


def test_solve_sat(run):
    code, out, _ = run(["solve"], "p cnf 1 1\n1 0\n")
    assert code == 10
    assert out.splitlines() == ["s SATISFIABLE", "v 1 0"]


def test_solve_unsat(run):
    code, out, _ = run(["solve", "--no-early-stop"], "p cnf 1 2\n1 0\n-1 0\n")
    assert code == 20 and out.strip() == "s UNSATISFIABLE"
    code, out, _ = run(["--format", "structured", "solve"], "p cnf 1 2\n1 0\n-1 0\n")
    assert code == 20 and json.loads(out)["sweeps"] == 0


def test_solve_from_path_structured(run, tmp_path):
    path = tmp_path / "f.cnf"
    path.write_text("p cnf 3 2\n1 -2 0\n2 3 0\n")
    code, out, _ = run(["--format", "structured", "solve", str(path), "--schema", "roundrobin"])
    assert code == 10
    rec = json.loads(out)
    assert rec["status"] == "SAT" and len(rec["witness"]) == 3


def test_solve_free_variables(run):
    code, out, _ = run(["solve"], "p cnf 3 1\n2 0\n")
    assert code == 10
    assert "v -1 2 -3 0" in out and "c free variables 1 3" in out


def test_count(run):
    code, out, _ = run(["count"], "p cnf 2 1\n1 2 0\n")
    assert code == 0 and out.strip() == "3"
    code, out, _ = run(["count", "--cap", "2"], "p cnf 2 1\n1 2 0\n")
    assert "truncated" in out


def test_reduce(run, tmp_path):
    code, out, _ = run(["reduce"], "p cnf 4 1\n1 2 3 4 0\n")
    assert code == 0
    assert parse_dimacs(out).to_lists() == [[1, 2, 5], [-5, 3, 4]]
    target = tmp_path / "r.cnf"
    run(["reduce", "-o", str(target)], "p cnf 4 1\n1 2 3 4 0\n")
    assert parse_dimacs(target.read_text()).m == 2


def test_deplete_trace(run, tmp_path):
    trace = tmp_path / "trace.jsonl"
    code, out, _ = run(["--format", "structured", "deplete", "--trace", str(trace), "--schema", "roundrobin"],
                       "p cnf 1 2\n1 0\n-1 0\n")
    summary = json.loads(out)
    records = [json.loads(x) for x in trace.read_text().splitlines()]
    assert code == 0 and summary["true_after"] == 0 and summary["pattern"] == [0, 1]
    assert len(records) == summary["steps"]
    assert records[-1]["true_count"] == 0 and set(records[0]) == {"triplet", "flips", "true_count"}


def test_deplete_human_trace_to_stdout(run):
    code, out, _ = run(["deplete", "--trace", "-"], "p cnf 1 1\n1 0\n")
    assert code == 0 and json.loads(out.splitlines()[0])["triplet"] == [0, 0, 0]


def test_conflicting_flags(run):
    code, _, err = run(["--format", "structured", "deplete", "--trace", "-"], "p cnf 1 1\n1 0\n")
    assert code == 1 and "cannot share" in err


def test_lex(run):
    code, out, _ = run(["lex"], "p cnf 2 2\n1 2 0\n-1 0\n")
    assert code == 10 and "x2 & ~x1" in out
    code, out, _ = run(["--format", "structured", "lex"], "p cnf 1 2\n1 0\n-1 0\n")
    assert code == 20 and json.loads(out)["encoded_status"] == "UNSAT"


def test_errors_exit_1(run, tmp_path):
    code, _, err = run(["solve"], "p cnf 1 1\n1 x 0\n")
    assert code == 1 and "line 2" in err
    code, _, err = run(["solve", str(tmp_path / "missing.cnf")])
    assert code == 1
    code, _, err = run(["solve"], "p cnf 1 2\n1 0\n1 0\n")
    assert code == 1 and "not normal" in err
    code, _, _ = run(["solve", "--repair"], "p cnf 1 2\n1 0\n1 0\n")
    assert code == 10
    code, _, _ = run(["solve", "--strict-dimacs"], "p cnf 1 2\n1 0\n")
    assert code == 1


def test_capacity_env(run, monkeypatch):
    monkeypatch.setenv("COMPATSAT_MAX_VARS", "2")
    code, _, err = run(["solve"], "p cnf 3 1\n1 2 3 0\n")
    assert code == 1 and "limit" in err


def test_fuzz_and_bench(run, tmp_path):
    code, out, _ = run(["--format", "structured", "fuzz", "--instances", "20", "--max-vars", "5",
                        "--max-clauses", "10", "--count", "--reproducers", str(tmp_path)])
    lines = [json.loads(x) for x in out.splitlines()]
    assert code == 0 and lines[-1]["kind"] == "summary" and lines[-1]["instances"] == 20
    code, out, _ = run(["bench", "--m", "4", "8", "--repetitions", "1"])
    assert code == 0 and "log-log slope" in out


def test_claim_violated_output(run, monkeypatch, tmp_path):
    from compatsat import pipeline
    from compatsat.grids import Status, Verdict
    monkeypatch.setattr(pipeline, "decide", lambda t: Verdict(Status.CLAIM_VIOLATED, any_true=True,
                                                              evidence={"true_count": 7}))
    ev = tmp_path / "ev.json"
    code, out, _ = run(["solve", "--evidence", str(ev)], "p cnf 1 1\n1 0\n")
    assert code == 30 and out.splitlines()[0] == "s UNKNOWN (CLAIM-VIOLATED)"
    assert json.loads(ev.read_text()) == {"true_count": 7}

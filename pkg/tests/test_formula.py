import logging
from itertools import product as cartesian

import pytest
from hypothesis import given, strategies as st

from compatsat.formula import (
    BooleanEquation,
    CapacityError,
    Clause,
    CnfFormula,
    DimacsError,
    NormalityError,
    cnf_to_system,
    exactly_one_equation,
    parse_dimacs,
    repair,
    satisfying_rows,
    to_dimacs,
    validate_normality,
)
from compatsat.harness import clause_space, random_cnf


def test_parse_smallest():
    f = parse_dimacs("p cnf 1 1\n1 0")
    assert f.to_lists() == [[1]] and f.variable_count == 1 and f.m == 1


def test_parse_contradiction():
    f = parse_dimacs("p cnf 1 2\n1 0\n-1 0")
    assert f.to_lists() == [[1], [-1]]
    assert f.clauses[1].literals[0].negated


def test_parse_round_trip():
    text = "p cnf 3 2\n1 -2 3 0\n2 3 0\n"
    f = parse_dimacs(text)
    assert f.m == 2 and f.K == 3
    assert to_dimacs(f) == text
    assert parse_dimacs(to_dimacs(f)) == f


def test_parse_comments_and_multiline_clauses():
    f = parse_dimacs("c hello\np cnf 3 2\n1 -2\n 3 0 2\n3 0\n")
    assert f.to_lists() == [[1, -2, 3], [2, 3]]


@pytest.mark.parametrize("text,line", [
    ("p cnf 2 1\n1 x 0", 2),
    ("p cnf 2 2\n1 0\n0\n", 3),
    ("p cnf 2 1\n1 2", 2),
    ("p dnf 2 1\n1 0", 1),
    ("1 0\np cnf 1 1", 1),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(DimacsError) as err:
        parse_dimacs(text)
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_header_mismatch_warns_or_fails(caplog):
    text = "p cnf 1 3\n1 2 0\n"
    with caplog.at_level(logging.WARNING):
        f = parse_dimacs(text)
    assert f.variable_count == 2
    assert "header" in caplog.text
    with pytest.raises(DimacsError):
        parse_dimacs(text, strict=True)


def test_normality_reports():
    assert validate_normality(CnfFormula.from_lists([[1, 2], [-1]])).ok
    rep = validate_normality(CnfFormula.from_lists([[1], [1]]))
    assert rep.duplicate_clauses == [(0, 1)]
    rep = validate_normality(CnfFormula.from_lists([[1, -1, 2]]))
    assert rep.complementary_literals == [0] and not rep.ok
    rep = validate_normality(CnfFormula.from_lists([[1, 2, 1], [2, 1]]))
    assert rep.repeated_literals == [0] and rep.duplicate_clauses == [(0, 1)]


def test_repair_and_rejection():
    f = CnfFormula.from_lists([[1, 2, 1], [2, 1], [3]])
    assert repair(f).to_lists() == [[1, 2], [3]]
    with pytest.raises(NormalityError):
        cnf_to_system(CnfFormula.from_lists([[1], [1]]))
    assert cnf_to_system(CnfFormula.from_lists([[1], [1]]), auto_repair=True).m == 1
    with pytest.raises(NormalityError):
        repair(CnfFormula.from_lists([[1, -1]]))


def test_literal_and_clause_contracts():
    with pytest.raises(ValueError):
        Clause(())
    with pytest.raises(ValueError):
        CnfFormula.from_lists([[3]], variable_count=2)


def test_cnf_to_system_rows():
    s = cnf_to_system(CnfFormula.from_lists([[1]]))
    assert s.m == 1 and s.equations[0].n == 1
    assert satisfying_rows(s.equations[0]) == [((1, True),)]
    s = cnf_to_system(CnfFormula.from_lists([[1, 2]]))
    assert len(satisfying_rows(s.equations[0])) == 3
    clause = [1, -2, 3]
    s = cnf_to_system(CnfFormula.from_lists([clause]))
    oracle = [vals for vals in cartesian((False, True), repeat=3)
              if vals[0] or not vals[1] or vals[2]]
    assert len(oracle) == 7
    assert [tuple(v for _, v in row) for row in satisfying_rows(s.equations[0])] == oracle
    assert s.n == 3


def test_satisfying_rows_general_equations():
    tautology = BooleanEquation((1,), lambda v: v[0] or not v[0])
    assert len(satisfying_rows(tautology)) == 2
    eq = exactly_one_equation([3, 1, 2])
    expected = [vals for vals in cartesian((False, True), repeat=3) if sum(vals) == 1]
    assert len(expected) == 3
    rows = satisfying_rows(eq)
    assert [tuple(v for _, v in r) for r in rows] == expected
    assert all([v for v, _ in r] == [1, 2, 3] for r in rows)


def test_satisfying_rows_guard():
    eq = BooleanEquation(tuple(range(1, 6)), lambda v: True)
    with pytest.raises(CapacityError):
        satisfying_rows(eq, limit=4)


def test_env_overrides_guard(monkeypatch):
    monkeypatch.setenv("COMPATSAT_MAX_VARS", "2")
    with pytest.raises(CapacityError):
        satisfying_rows(exactly_one_equation([1, 2, 3]))


@given(st.integers(3, 8), st.integers(1, 10), st.integers(0, 10_000))
def test_dimacs_round_trip_random(n, m, seed):
    f = random_cnf(n, min(m, clause_space(n, 3)), 3, seed)
    assert parse_dimacs(to_dimacs(f)) == f


@given(st.integers(1, 3).flatmap(lambda k: st.lists(st.integers(1, 4), min_size=k, max_size=k, unique=True)),
       st.lists(st.booleans(), min_size=3, max_size=3))
def test_row_partition(variables, signs):
    lits = [v if s else -v for v, s in zip(variables, signs)]
    eq = cnf_to_system(CnfFormula.from_lists([lits])).equations[0]
    rows = satisfying_rows(eq)
    falsifying = [vals for vals in cartesian((False, True), repeat=eq.n)
                  if not eq.predicate(vals)]
    assert len(rows) + len(falsifying) == 2 ** eq.n
    assert rows == satisfying_rows(eq)

from itertools import product as cartesian

from hypothesis import given, settings, strategies as st

from compatsat.compat import verify_symmetry
from compatsat.deplete import deplete
from compatsat.formula import CnfFormula, parse_dimacs
from compatsat.grids import Status
from compatsat.harness import all_clauses, clause_space, random_cnf
from compatsat.pipeline import (
    build_lex_matrix,
    cook_reduce,
    enumerate_implicants,
    find_implicant,
    lex_xor_encode,
    resolution_function,
    solve_system,
)
from compatsat.grids import enumerate_grids, glue
from compatsat.compat import build_compat_matrix
from oracles import models

F = CnfFormula.from_lists


def test_reduce_passthrough():
    red = cook_reduce(F([[1, -2, 3]]))
    assert red.reduced.to_lists() == [[1, -2, 3]] and len(red.aux_variables) == 0


def test_reduce_four_literals():
    f = F([[1, 2, -3, 4]])
    red = cook_reduce(f)
    assert red.reduced.to_lists() == [[1, 2, 5], [-5, -3, 4]]
    assert list(red.aux_variables) == [5]
    # over all 2^5 assignments: projections of reduced models are exactly the models of f
    proj = set()
    for vals in cartesian((False, True), repeat=5):
        a = dict(zip(range(1, 6), vals))
        if all(any(a[abs(x)] == (x > 0) for x in c) for c in red.reduced.to_lists()):
            proj.add(tuple(a[v] for v in range(1, 5)))
    assert proj == {tuple(m[v] for v in range(1, 5)) for m in models(f.to_lists())}


def test_reduce_keeps_unsat():
    red = cook_reduce(F([[1], [-1]]))
    assert models(red.reduced.to_lists()) == []


def test_reduce_dimacs_records_aux_map():
    text = cook_reduce(F([[1, 2, 3, 4, 5], [1]])).to_dimacs()
    assert "c aux variables 6..7" in text
    assert "c aux-map source clause 1 -> clauses 1 2 3" in text
    assert parse_dimacs(text).m == 4


@settings(max_examples=80, deadline=None)
@given(st.integers(4, 7), st.integers(1, 4), st.integers(0, 2 ** 32))
def test_reduce_equisatisfiable_and_bounded(n, m, seed):
    f = random_cnf(n, min(m, clause_space(n, min(n, 6), 1)), min(n, 6), seed, min_width=1)
    red = cook_reduce(f)
    assert max(len(c) for c in red.reduced.clauses) <= 3
    assert red.reduced.m == sum(max(1, len(c) - 2) for c in f.clauses)
    red_models = models(red.reduced.to_lists())
    assert bool(red_models) == bool(models(f.to_lists()))
    for model in red_models:
        restricted = red.restrict(model)
        assert all(any(restricted.get(abs(x), False) == (x > 0) for x in c) for c in f.to_lists())


def test_resolution_function_examples():
    assert resolution_function(F([[1]])) is True
    assert resolution_function(F([[1], [-1]])) is False
    assert resolution_function(F([[1, 2, 3, 4], [-1], [-2], [-3], [-4]])) is False


def test_lex_matrix_examples():
    lex = build_lex_matrix(F([[1], [-1]]))
    assert lex.box(0, 1).to_lists() == [[False]]
    lex = build_lex_matrix(F([[1], [1]]), check=False)
    assert lex.box(0, 1).to_lists() == [[True]]
    f = F([[1, 2, 3], [-1, 2, 4], [3, -4, 5], [-2, -3, -5]])
    lex = build_lex_matrix(f)
    assert f.K == 3 and f.m == 4
    assert lex.cell_count <= (f.K * f.m) ** 2
    assert verify_symmetry(lex.compat)
    for p in range(4):
        assert lex.box(p, p).to_lists() == [[a == b for b in range(3)] for a in range(3)]
    deplete(lex.compat, inplace=True)
    assert verify_symmetry(lex.compat)


def test_find_implicant_examples():
    # selections: (x1, ~x1) complementary, (x2, ~x1) fine
    imp = find_implicant(F([[1, 2], [-1]]))
    assert [x.to_int() for x in imp] == [2, -1]
    assert find_implicant(F([[1], [-1]])) is None


def test_xor_encoding_examples():
    enc = lex_xor_encode(F([[1], [-1]]))
    assert enc.system.variable_count == 2 and enc.system.m == 3 and enc.exclusions == 1
    assert solve_system(enc.system).verdict.status is Status.UNSAT
    enc = lex_xor_encode(F([[1, -2, 3, 4]]))
    t = build_compat_matrix(enc.system)
    assert enc.system.m == 1 and enumerate_grids(t).count == 4


def small_formulas():
    pool = all_clauses(2)
    for a in range(len(pool)):
        yield CnfFormula((pool[a],))
        for b in range(a + 1, len(pool)):
            yield CnfFormula((pool[a], pool[b]))


def test_lex_paths_against_oracle():
    for f in small_formulas():
        sat = bool(models(f.to_lists()))
        assert (find_implicant(f) is not None) == sat
        enc = lex_xor_encode(f)
        sol = solve_system(enc.system)
        assert sol.verdict.satisfiable == sat
        # encoded solutions biject with implicants
        t = build_compat_matrix(enc.system)
        selections = sorted(enc.selection(glue(g, t).assignment) for g in enumerate_grids(t).grids)
        assert selections == sorted(enumerate_implicants(f))

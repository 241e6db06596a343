"""End-to-end compositions: clause splitting, the resolution bit, and the
literal-level (lexicographic) compatibility matrix with its exactly-one encoding."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .compat import CompatMatrix, build_compat_matrix
from .deplete import DepletionOutcome, Schema, deplete
from .formula import (
    BooleanEquation,
    BooleanSystem,
    Clause,
    CnfFormula,
    Literal,
    cnf_to_system,
    exactly_one_equation,
    require_normal,
    to_dimacs,
)
from .grids import Status, Verdict, decide


# -- clause splitting ---------------------------------------------------------

@dataclass
class ReductionMap:
    source: CnfFormula
    reduced: CnfFormula
    aux_variables: range
    produced: list[list[int]] = field(default_factory=list)  # source clause -> indices into reduced

    def restrict(self, assignment: dict[int, bool]) -> dict[int, bool]:
        """Drop auxiliary variables from a model of the reduced formula."""
        return {v: val for v, val in assignment.items() if v not in self.aux_variables}

    def to_dimacs(self) -> str:
        comments = [f"reduced from {self.source.m} clauses over {self.source.variable_count} variables"]
        if len(self.aux_variables):
            comments.append(f"aux variables {self.aux_variables.start}..{self.aux_variables.stop - 1}")
        for src, idxs in enumerate(self.produced):
            if len(idxs) > 1:
                comments.append(f"aux-map source clause {src + 1} -> clauses "
                                + " ".join(str(k + 1) for k in idxs))
        return to_dimacs(self.reduced, comments)


def cook_reduce(f: CnfFormula, auto_repair: bool = False) -> ReductionMap:
    """Split clauses wider than 3 into chains linked by fresh variables.

    (q1 | ... | qk) becomes (q1 | q2 | y1) & (~y1 | q3 | y2) & ... & (~y_{k-3} | q_{k-1} | qk).
    """
    f = require_normal(f, auto_repair)
    next_var = f.variable_count + 1
    first_aux = next_var
    out: list[Clause] = []
    produced = []
    for clause in f.clauses:
        lits = clause.literals
        start = len(out)
        if len(lits) <= 3:
            out.append(clause)
        else:
            y = Literal(next_var)
            next_var += 1
            out.append(Clause((lits[0], lits[1], y)))
            for q in lits[2:-2]:
                z = Literal(next_var)
                next_var += 1
                out.append(Clause((-y, q, z)))
                y = z
            out.append(Clause((-y, lits[-2], lits[-1])))
        produced.append(list(range(start, len(out))))
    reduced = CnfFormula(tuple(out), next_var - 1)
    return ReductionMap(f, reduced, range(first_aux, next_var), produced)


# -- the main path ------------------------------------------------------------

@dataclass
class Solution:
    verdict: Verdict
    depletion: DepletionOutcome
    compat: CompatMatrix


def solve_system(s: BooleanSystem, schema: Schema | str = Schema.WORKLIST,
                 early_stop: bool = False, limit: int | None = None) -> Solution:
    """Build, deplete and classify. ``early_stop`` may skip the fixpoint on UNSAT input."""
    t = build_compat_matrix(s, limit)
    outcome = deplete(t, schema, early_stop=early_stop, inplace=True)
    if outcome.stopped_early:
        # an all-false box already rules out every grid
        verdict = Verdict(Status.UNSAT, any_true=t.any_true(), diagonal_true=t.any_diagonal_true(),
                          evidence={"pattern": list(outcome.early_stop)})
    else:
        verdict = decide(t)
    return Solution(verdict, outcome, t)


def solve_cnf(f: CnfFormula, schema: Schema | str = Schema.WORKLIST, early_stop: bool = False,
              auto_repair: bool = False, limit: int | None = None) -> Solution:
    return solve_system(cnf_to_system(f, auto_repair), schema, early_stop, limit)


def resolution_function(f: CnfFormula, schema: Schema | str = Schema.WORKLIST,
                        auto_repair: bool = False) -> bool:
    """OR of the diagonal cells of the depleted matrix of the 3-literal reduction of ``f``.

    This is the depletion method's own satisfiability bit; it can only err by
    answering true on unsatisfiable input. ``decide`` is authoritative.
    """
    reduced = cook_reduce(f, auto_repair).reduced
    t = build_compat_matrix(cnf_to_system(reduced))
    deplete(t, schema, inplace=True)
    return t.any_diagonal_true()


# -- lexicographic matrix ----------------------------------------------------------

@dataclass
class LexMatrix:
    """Literal-level compatibility: cell (p, q, a, b) is true iff literal a of
    clause p is not the complement of literal b of clause q (identity on p == q)."""

    formula: CnfFormula
    compat: CompatMatrix

    @property
    def m(self) -> int:
        return self.compat.m

    def box(self, p: int, q: int):
        return self.compat.box(p, q)

    def literal(self, p: int, a: int) -> Literal:
        return self.formula.clauses[p].literals[a]

    @property
    def cell_count(self) -> int:
        n = sum(self.compat.sizes)
        return n * n

    def false_cells(self) -> Iterator[tuple[int, int, int, int]]:
        """Off-diagonal-box false cells with p < q."""
        for p in range(self.m):
            for q in range(p + 1, self.m):
                box = self.compat.packed(p, q)
                full = (1 << self.compat.sizes[q]) - 1
                for a, word in enumerate(box):
                    missing = full & ~word
                    while missing:
                        low = missing & -missing
                        yield p, q, a, low.bit_length() - 1
                        missing ^= low


def build_lex_matrix(f: CnfFormula, check: bool = True) -> LexMatrix:
    """``check=False`` skips the normality requirement (duplicate clauses then stay)."""
    if check:
        f = require_normal(f)
    tables = [[((0, False),)] * len(c) for c in f.clauses]  # placeholder rows, unused
    m = f.m
    boxes: list[list[list[int]]] = [[[] for _ in range(m)] for _ in range(m)]
    lits = [[x.to_int() for x in c.literals] for c in f.clauses]
    for p in range(m):
        boxes[p][p] = [1 << a for a in range(len(lits[p]))]
        for q in range(m):
            if q == p:
                continue
            rows = []
            for x in lits[p]:
                word = 0
                for b, y in enumerate(lits[q]):
                    if x != -y:
                        word |= 1 << b
                rows.append(word)
            boxes[p][q] = rows
    return LexMatrix(f, CompatMatrix(tables, boxes, f.variable_count))


def enumerate_implicants(f: CnfFormula, check: bool = True) -> Iterator[tuple[int, ...]]:
    """All literal selections (one index per clause) with no complementary pair."""
    lex = build_lex_matrix(f, check)
    t = lex.compat
    m = t.m
    if m == 0:
        yield ()
        return
    chosen = [0] * m

    def extend(p, domains):
        if p == m:
            yield tuple(chosen)
            return
        word = domains[p]
        while word:
            low = word & -word
            a = low.bit_length() - 1
            word ^= low
            narrowed = list(domains)
            ok = True
            for q in range(p + 1, m):
                narrowed[q] &= t._boxes[p][q][a]
                if not narrowed[q]:
                    ok = False
                    break
            if ok:
                chosen[p] = a
                yield from extend(p + 1, narrowed)

    yield from extend(0, [(1 << s) - 1 for s in t.sizes])


def find_implicant(f: CnfFormula, check: bool = True) -> Optional[list[Literal]]:
    """One literal per clause, pairwise non-complementary; None iff ``f`` is unsatisfiable."""
    for sel in enumerate_implicants(f, check):
        return [f.clauses[p].literals[a] for p, a in enumerate(sel)]
    return None


@dataclass
class LexEncoding:
    system: BooleanSystem
    indicators: dict[int, tuple[int, int]]  # indicator variable -> (clause, literal position)
    exclusions: int

    def selection(self, assignment: dict[int, bool]) -> tuple[int, ...]:
        """Literal index chosen in each clause by an indicator assignment."""
        m = max((p for p, _ in self.indicators.values()), default=-1) + 1
        chosen = [-1] * m
        for var, (p, a) in self.indicators.items():
            if assignment.get(var):
                chosen[p] = a
        return tuple(chosen)


def lex_xor_encode(f: CnfFormula, check: bool = True) -> LexEncoding:
    """Indicator system whose solutions are exactly the implicants of ``f``.

    One indicator per literal occurrence; per clause, exactly one indicator
    is true (the multi-argument "xor" here means exactly-one, not parity);
    per complementary literal pair across clauses, not both indicators.
    """
    lex = build_lex_matrix(f, check)
    ids: dict[tuple[int, int], int] = {}
    var = 1
    for p, clause in enumerate(f.clauses):
        for a in range(len(clause)):
            ids[(p, a)] = var
            var += 1
    equations: list[BooleanEquation] = []
    for p, clause in enumerate(f.clauses):
        equations.append(exactly_one_equation([ids[(p, a)] for a in range(len(clause))],
                                              label=f"one-of clause {p + 1}"))
    exclusions = 0
    for p, q, a, b in lex.false_cells():
        equations.append(BooleanEquation(
            (ids[(p, a)], ids[(q, b)]),
            lambda v: not (v[0] and v[1]),
            label=f"not both {lex.literal(p, a)}@{p + 1} {lex.literal(q, b)}@{q + 1}",
        ))
        exclusions += 1
    return LexEncoding(BooleanSystem(tuple(equations), var - 1),
                       {v: key for key, v in ids.items()}, exclusions)

"""CNF formulas, general Boolean systems, DIMACS I/O and truth-table rows."""
from __future__ import annotations

import itertools
import logging
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)

DEFAULT_ROW_LIMIT = 24


class DimacsError(ValueError):
    """Malformed DIMACS input. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NormalityError(ValueError):
    def __init__(self, report: "NormalityReport"):
        self.report = report
        super().__init__(f"formula is not normal: {report.describe()}")


class CapacityError(RuntimeError):
    """An enumeration guard was exceeded."""


def row_limit() -> int:
    """Enumeration guard, overridable through ``COMPATSAT_MAX_VARS``."""
    raw = os.environ.get("COMPATSAT_MAX_VARS")
    return int(raw) if raw else DEFAULT_ROW_LIMIT


@dataclass(frozen=True, order=True)
class Literal:
    variable: int
    negated: bool = False

    def __post_init__(self):
        if self.variable < 1:
            raise ValueError(f"variable ids start at 1, got {self.variable}")

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(lit), lit < 0)

    def to_int(self) -> int:
        return -self.variable if self.negated else self.variable

    def __neg__(self) -> "Literal":
        return Literal(self.variable, not self.negated)

    def value_under(self, value: bool) -> bool:
        return value != self.negated

    def __str__(self) -> str:
        return f"{'~' if self.negated else ''}x{self.variable}"


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]

    def __post_init__(self):
        if not self.literals:
            raise ValueError("clauses need at least one literal")

    @classmethod
    def of(cls, *lits: int) -> "Clause":
        return cls(tuple(Literal.from_int(x) for x in lits))

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self):
        return iter(self.literals)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(lit.variable for lit in self.literals)

    def key(self) -> frozenset[int]:
        """Order-insensitive identity used for the duplicate-clause check."""
        return frozenset(lit.to_int() for lit in self.literals)

    def evaluate(self, assignment: Mapping[int, bool]) -> bool:
        return any(lit.value_under(assignment[lit.variable]) for lit in self.literals)

    def to_ints(self) -> list[int]:
        return [lit.to_int() for lit in self.literals]

    def __str__(self) -> str:
        return "(" + " | ".join(str(x) for x in self.literals) + ")"


@dataclass(frozen=True)
class CnfFormula:
    clauses: tuple[Clause, ...]
    variable_count: int = 0

    def __post_init__(self):
        top = max((lit.variable for c in self.clauses for lit in c), default=0)
        if self.variable_count < top:
            if self.variable_count:
                raise ValueError(f"literal on x{top} exceeds variable_count={self.variable_count}")
            object.__setattr__(self, "variable_count", top)

    @classmethod
    def from_lists(cls, clauses: Iterable[Sequence[int]], variable_count: int = 0) -> "CnfFormula":
        return cls(tuple(Clause.of(*c) for c in clauses), variable_count)

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def K(self) -> int:
        return max((len(c) for c in self.clauses), default=0)

    def occurring_variables(self) -> list[int]:
        return sorted({lit.variable for c in self.clauses for lit in c})

    def evaluate(self, assignment: Mapping[int, bool]) -> bool:
        return all(c.evaluate(assignment) for c in self.clauses)

    def to_lists(self) -> list[list[int]]:
        return [c.to_ints() for c in self.clauses]

    def __str__(self) -> str:
        return " & ".join(str(c) for c in self.clauses) or "<empty>"


# -- DIMACS -----------------------------------------------------------------

def parse_dimacs(text: str | Iterable[str], strict: bool = False) -> CnfFormula:
    """Read DIMACS CNF.

    Header/body disagreement is logged as a warning unless ``strict``.
    Empty clauses and variable 0 are rejected.
    """
    lines = text.splitlines() if isinstance(text, str) else list(text)
    header: tuple[int, int] | None = None
    header_line = None
    clauses: list[Clause] = []
    pending: list[int] = []
    pending_start = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            # SATLIB files end with "%\n0"
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise DimacsError("second problem line", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"bad problem line {line!r}", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"bad problem line {line!r}", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise DimacsError("negative counts in problem line", lineno)
            header_line = lineno
            continue
        if header is None:
            raise DimacsError("clause before problem line", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"malformed token {tok!r}", lineno) from None
            if lit == 0:
                if not pending:
                    raise DimacsError("empty clause", lineno)
                clauses.append(Clause.of(*pending))
                pending = []
                pending_start = None
            else:
                if pending_start is None:
                    pending_start = lineno
                pending.append(lit)
    if pending:
        raise DimacsError("clause not terminated by 0", pending_start)
    if header is None:
        raise DimacsError("missing problem line")
    nvars, nclauses = header
    top = max((lit.variable for c in clauses for lit in c), default=0)
    problems = []
    if nclauses != len(clauses):
        problems.append(f"header declares {nclauses} clauses, found {len(clauses)}")
    if top > nvars:
        problems.append(f"header declares {nvars} variables, found x{top}")
    if problems:
        msg = "; ".join(problems)
        if strict:
            raise DimacsError(msg, header_line)
        logger.warning("DIMACS header mismatch: %s", msg)
    return CnfFormula(tuple(clauses), max(nvars, top))


def to_dimacs(f: CnfFormula, comments: Sequence[str] = ()) -> str:
    out = [f"c {c}" if c else "c" for c in comments]
    out.append(f"p cnf {f.variable_count} {f.m}")
    out.extend(" ".join(str(x) for x in c.to_ints()) + " 0" for c in f.clauses)
    return "\n".join(out) + "\n"


# -- normality --------------------------------------------------------------

@dataclass
class NormalityReport:
    duplicate_clauses: list[tuple[int, int]] = field(default_factory=list)
    repeated_literals: list[int] = field(default_factory=list)
    complementary_literals: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.duplicate_clauses or self.repeated_literals or self.complementary_literals)

    def describe(self) -> str:
        parts = []
        if self.duplicate_clauses:
            parts.append("duplicate clauses " + ", ".join(f"{i}={j}" for i, j in self.duplicate_clauses))
        if self.repeated_literals:
            parts.append(f"repeated literals in clauses {self.repeated_literals}")
        if self.complementary_literals:
            parts.append(f"complementary literals in clauses {self.complementary_literals}")
        return "; ".join(parts) or "normal"


def validate_normality(f: CnfFormula) -> NormalityReport:
    """Check that clauses are distinct and each clause mentions a variable once.

    Clause indices in the report are 0-based.
    """
    report = NormalityReport()
    first_seen: dict[frozenset[int], int] = {}
    for idx, clause in enumerate(f.clauses):
        key = clause.key()
        if key in first_seen:
            report.duplicate_clauses.append((first_seen[key], idx))
        else:
            first_seen[key] = idx
        lits = clause.to_ints()
        if len(set(lits)) != len(lits):
            report.repeated_literals.append(idx)
        if any(-x in lits for x in lits):
            report.complementary_literals.append(idx)
    return report


def repair(f: CnfFormula) -> CnfFormula:
    """Merge repeated literals and drop duplicate clauses.

    Tautological clauses are rejected rather than dropped, so the repaired
    formula has exactly the models of the input.
    """
    seen: set[frozenset[int]] = set()
    out = []
    for idx, clause in enumerate(f.clauses):
        lits = list(dict.fromkeys(clause.to_ints()))
        if any(-x in lits for x in lits):
            raise NormalityError(NormalityReport(complementary_literals=[idx]))
        key = frozenset(lits)
        if key in seen:
            continue
        seen.add(key)
        out.append(Clause.of(*lits))
    return CnfFormula(tuple(out), f.variable_count)


def require_normal(f: CnfFormula, auto_repair: bool = False) -> CnfFormula:
    report = validate_normality(f)
    if report.ok:
        return f
    if auto_repair:
        return repair(f)
    raise NormalityError(report)


# -- Boolean systems ----------------------------------------------------------

@dataclass(frozen=True)
class BooleanEquation:
    """One equation of a system, seen only through its satisfaction oracle.

    ``predicate`` receives a tuple of truth values aligned with
    ``local_variables`` and answers whether both sides agree.
    """

    local_variables: tuple[int, ...]
    predicate: Callable[[tuple[bool, ...]], bool] = field(compare=False)
    label: str = ""

    def __post_init__(self):
        if not self.local_variables:
            raise ValueError("an equation needs at least one variable")
        if len(set(self.local_variables)) != len(self.local_variables):
            raise ValueError(f"repeated variable in {self.local_variables}")
        if min(self.local_variables) < 1:
            raise ValueError("variable ids start at 1")

    @property
    def n(self) -> int:
        return len(self.local_variables)

    def holds(self, assignment: Mapping[int, bool]) -> bool:
        return bool(self.predicate(tuple(assignment[v] for v in self.local_variables)))


def clause_equation(clause: Clause) -> BooleanEquation:
    signs = tuple(lit.negated for lit in clause.literals)
    return BooleanEquation(
        clause.variables,
        lambda values, _s=signs: any(v != neg for v, neg in zip(values, _s)),
        label=str(clause),
    )


def exactly_one_equation(variables: Sequence[int], label: str = "") -> BooleanEquation:
    return BooleanEquation(tuple(variables), lambda values: sum(values) == 1, label=label)


@dataclass(frozen=True)
class BooleanSystem:
    equations: tuple[BooleanEquation, ...]
    variable_count: int = 0

    def __post_init__(self):
        top = max((v for e in self.equations for v in e.local_variables), default=0)
        if self.variable_count < top:
            object.__setattr__(self, "variable_count", top)

    @property
    def m(self) -> int:
        return len(self.equations)

    @property
    def n(self) -> int:
        return max((e.n for e in self.equations), default=0)

    def occurring_variables(self) -> list[int]:
        return sorted({v for e in self.equations for v in e.local_variables})

    def free_variables(self) -> list[int]:
        used = set(self.occurring_variables())
        return [v for v in range(1, self.variable_count + 1) if v not in used]

    def holds(self, assignment: Mapping[int, bool]) -> bool:
        return all(e.holds(assignment) for e in self.equations)


def cnf_to_system(f: CnfFormula, auto_repair: bool = False) -> BooleanSystem:
    """One equation ``clause = true`` per clause."""
    f = require_normal(f, auto_repair)
    return BooleanSystem(tuple(clause_equation(c) for c in f.clauses), f.variable_count)


# -- truth-table rows ---------------------------------------------------------

# A row is a partial assignment stored as a sorted tuple of (variable, value).
Row = tuple[tuple[int, bool], ...]


def satisfying_rows(e: BooleanEquation, limit: int | None = None) -> list[Row]:
    """Satisfying assignments of ``e`` over its sorted variables, false before true."""
    limit = row_limit() if limit is None else limit
    if e.n > limit:
        raise CapacityError(f"equation over {e.n} variables exceeds the enumeration limit {limit}")
    order = sorted(e.local_variables)
    pos = [order.index(v) for v in e.local_variables]
    rows = []
    for values in itertools.product((False, True), repeat=e.n):
        if e.predicate(tuple(values[p] for p in pos)):
            rows.append(tuple(zip(order, values)))
    return rows

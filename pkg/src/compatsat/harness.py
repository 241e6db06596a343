"""Brute-force oracle, random instances, cross-check fuzzing and scaling runs."""
from __future__ import annotations

import json
import logging
import math
import random
import time
from dataclasses import asdict, dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Callable, Iterable, Iterator, Optional

import numpy as np

from .compat import CompatMatrix, build_compat_matrix, verify_symmetry
from .deplete import Schema, deplete, diagonal_support_holds
from .formula import (
    CapacityError,
    Clause,
    CnfFormula,
    Literal,
    cnf_to_system,
    row_limit,
    to_dimacs,
)
from .grids import Status, decide, enumerate_grids

logger = logging.getLogger(__name__)


class OracleMismatch(AssertionError):
    """The solver disagreed with brute force. Always an artifact bug."""

    def __init__(self, message: str, formula: CnfFormula):
        self.formula = formula
        super().__init__(f"{message}\n{to_dimacs(formula)}")


class InvariantViolation(AssertionError):
    def __init__(self, message: str, formula: CnfFormula):
        self.formula = formula
        super().__init__(f"{message}\n{to_dimacs(formula)}")


# -- oracle -------------------------------------------------------------------

@dataclass
class OracleResult:
    satisfiable: bool
    model_count: int
    model: Optional[dict[int, bool]]


def _model_table(f: CnfFormula, limit: int | None) -> tuple[list[int], np.ndarray]:
    """Occurring variables and a boolean mask over all 2^n assignments (bit k = k-th variable)."""
    limit = row_limit() if limit is None else limit
    variables = f.occurring_variables()
    n = len(variables)
    if n > limit:
        raise CapacityError(f"brute force over {n} variables exceeds the limit {limit}")
    index = {v: k for k, v in enumerate(variables)}
    codes = np.arange(1 << n, dtype=np.int64)
    bits = [((codes >> k) & 1).astype(bool) for k in range(n)]
    sat = np.ones(1 << n, dtype=bool)
    for clause in f.clauses:
        cl = np.zeros(1 << n, dtype=bool)
        for lit in clause:
            col = bits[index[lit.variable]]
            cl |= ~col if lit.negated else col
        sat &= cl
    return variables, sat


def brute_force(f: CnfFormula, limit: int | None = None) -> OracleResult:
    """Exhaustive check over the variables that occur in ``f``."""
    variables, sat = _model_table(f, limit)
    hits = np.flatnonzero(sat)
    if not len(hits):
        return OracleResult(False, 0, None)
    code = int(hits[0])
    model = {v: bool((code >> k) & 1) for k, v in enumerate(variables)}
    return OracleResult(True, len(hits), model)


def all_models(f: CnfFormula, limit: int | None = None) -> Iterator[dict[int, bool]]:
    variables, sat = _model_table(f, limit)
    for code in np.flatnonzero(sat):
        code = int(code)
        yield {v: bool((code >> k) & 1) for k, v in enumerate(variables)}


def check_model(f: CnfFormula, assignment: dict[int, bool]) -> bool:
    full = {v: assignment.get(v, False) for v in range(1, f.variable_count + 1)}
    return f.evaluate(full)


# -- instances ----------------------------------------------------------------

def random_cnf(vars: int, clauses: int, width: int, seed: int, min_width: int | None = None) -> CnfFormula:
    """Normal random CNF: distinct variables within a clause, no repeated clause.

    Clause widths are drawn uniformly from ``[min_width, width]`` (default: all ``width``).
    """
    min_width = width if min_width is None else min_width
    if not 1 <= min_width <= width:
        raise ValueError(f"bad width range [{min_width}, {width}]")
    if width > vars:
        raise ValueError(f"width {width} exceeds {vars} variables")
    available = clause_space(vars, width, min_width)
    if clauses > available:
        raise ValueError(f"only {available} distinct clauses exist, asked for {clauses}")
    rng = random.Random(seed)
    seen: set[frozenset[int]] = set()
    out = []
    while len(out) < clauses:
        w = rng.randint(min_width, width)
        picked = rng.sample(range(1, vars + 1), w)
        lits = [v if rng.random() < 0.5 else -v for v in picked]
        key = frozenset(lits)
        if key in seen:
            continue
        seen.add(key)
        out.append(Clause.of(*lits))
    return CnfFormula(tuple(out), vars)


def clause_space(vars: int, width: int, min_width: int | None = None) -> int:
    """Number of distinct normal clauses with widths in ``[min_width, width]``."""
    min_width = width if min_width is None else min_width
    return sum(math.comb(vars, w) * 2 ** w for w in range(min_width, width + 1))


def all_clauses(variables: int) -> list[Clause]:
    """Every normal clause over x1..x<variables>, shortest first."""
    out = []
    for w in range(1, variables + 1):
        for vs in combinations(range(1, variables + 1), w):
            for signs in range(1 << w):
                out.append(Clause(tuple(Literal(v, bool((signs >> k) & 1)) for k, v in enumerate(vs))))
    return out


def exhaustive_corpus(max_vars: int = 3, max_clauses: int = 3) -> Iterator[CnfFormula]:
    """Every normal CNF over at most ``max_vars`` variables with 1..``max_clauses`` clauses.

    Clause sets are taken as unordered, so each formula appears once.
    """
    pool = all_clauses(max_vars)
    for m in range(1, max_clauses + 1):
        for combo in combinations(pool, m):
            yield CnfFormula(combo)


# -- minimization -------------------------------------------------------------

def minimize(f: CnfFormula, still_failing: Callable[[CnfFormula], bool]) -> CnfFormula:
    """Greedy clause deletion, then literal deletion, keeping ``still_failing`` true."""
    if not still_failing(f):
        raise ValueError("formula does not exhibit the property to preserve")
    clauses = list(f.clauses)
    i = 0
    while i < len(clauses) and len(clauses) > 1:
        trial = CnfFormula(tuple(clauses[:i] + clauses[i + 1:]), f.variable_count)
        if still_failing(trial):
            clauses = list(trial.clauses)
        else:
            i += 1
    ci = 0
    while ci < len(clauses):
        lits = list(clauses[ci].literals)
        li = 0
        while li < len(lits) and len(lits) > 1:
            shorter = Clause(tuple(lits[:li] + lits[li + 1:]))
            if shorter.key() in {c.key() for k, c in enumerate(clauses) if k != ci}:
                li += 1
                continue
            trial_clauses = clauses[:ci] + [shorter] + clauses[ci + 1:]
            trial = CnfFormula(tuple(trial_clauses), f.variable_count)
            if still_failing(trial):
                clauses = trial_clauses
                lits = list(shorter.literals)
            else:
                li += 1
        ci += 1
    return CnfFormula(tuple(clauses), f.variable_count)


def claim_violated(f: CnfFormula, schema: Schema | str = Schema.WORKLIST) -> bool:
    t = build_compat_matrix(cnf_to_system(f))
    deplete(t, schema, inplace=True)
    return decide(t).status is Status.CLAIM_VIOLATED


# -- fuzzing ------------------------------------------------------------------

@dataclass
class FuzzConfig:
    instances: int = 1000
    seed: int = 0
    min_vars: int = 3
    max_vars: int = 12
    max_clauses: int = 30
    width: int = 3
    min_width: Optional[int] = None
    schema: str = "worklist"
    check_sweeps: bool = True
    check_counts: bool = False
    count_cap: int = 5000
    reproducer_dir: Optional[str] = None


@dataclass
class ViolationRecord:
    index: int
    seed: int
    dimacs: str
    surviving_true: int
    oracle_satisfiable: bool
    minimized_dimacs: str
    minimized_still_violates: bool


@dataclass
class FuzzReport:
    config: FuzzConfig
    instances: int = 0
    agreements: int = 0
    capacity_skips: int = 0
    sat: int = 0
    unsat: int = 0
    unsat_emptied: int = 0
    violations: list[ViolationRecord] = field(default_factory=list)
    sat_without_backtracks: int = 0
    backtracks_total: int = 0
    sweeps_checked: int = 0
    diagonal_support_checked: int = 0
    counts_checked: int = 0
    elapsed: float = 0.0

    @property
    def balanced(self) -> bool:
        return self.agreements + len(self.violations) + self.capacity_skips == self.instances

    def to_records(self) -> list[dict]:
        """Line-delimited form; timings excluded so equal seeds give equal output."""
        head = {"kind": "config", **asdict(self.config)}
        summary = {k: v for k, v in asdict(self).items() if k not in ("config", "violations", "elapsed")}
        summary["kind"] = "summary"
        summary["violation_count"] = len(self.violations)
        rows = [head]
        rows.extend({"kind": "violation", **asdict(v)} for v in self.violations)
        rows.append(summary)
        return rows

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.to_records())

    def summary(self) -> str:
        lines = [
            f"instances        {self.instances}",
            f"agreements       {self.agreements} (SAT {self.sat}, UNSAT {self.unsat})",
            f"claim violations {len(self.violations)}",
            f"capacity skips   {self.capacity_skips}",
            f"SAT found without backtracking {self.sat_without_backtracks}/{self.sat}",
            f"elapsed          {self.elapsed:.1f}s",
        ]
        return "\n".join(lines)


def _check_sweeps(f: CnfFormula):
    last = [None]

    def hook(t: CompatMatrix, sweep: int):
        if not verify_symmetry(t):
            raise InvariantViolation(f"symmetry broken after sweep {sweep}", f)
        count = t.true_count()
        if last[0] is not None and count > last[0]:
            raise InvariantViolation(f"true count rose from {last[0]} to {count} at sweep {sweep}", f)
        last[0] = count

    return hook


def check_instance(f: CnfFormula, report: FuzzReport, index: int, seed: int) -> None:
    """Run one instance through solver and oracle, updating ``report``."""
    cfg = report.config
    report.instances += 1
    try:
        oracle = brute_force(f)
        t = build_compat_matrix(cnf_to_system(f))
    except CapacityError:
        report.capacity_skips += 1
        return
    hook = _check_sweeps(f) if cfg.check_sweeps else None
    deplete(t, cfg.schema, inplace=True, on_sweep=hook)
    if cfg.check_sweeps:
        report.sweeps_checked += 1
    if not diagonal_support_holds(t):
        raise InvariantViolation("true cell without diagonal support at fixpoint", f)
    report.diagonal_support_checked += 1
    verdict = decide(t)
    if not verdict.tests_agree:
        raise InvariantViolation("diagonal test and any-true test disagree", f)

    if verdict.status is Status.CLAIM_VIOLATED:
        minimized = minimize(f, lambda g: claim_violated(g, cfg.schema))
        record = ViolationRecord(
            index=index, seed=seed, dimacs=to_dimacs(f),
            surviving_true=verdict.evidence["true_count"],
            oracle_satisfiable=oracle.satisfiable,
            minimized_dimacs=to_dimacs(minimized, [f"seed {seed}", f"oracle {'SAT' if brute_force(minimized).satisfiable else 'UNSAT'}"]),
            minimized_still_violates=claim_violated(minimized, cfg.schema),
        )
        report.violations.append(record)
        logger.warning("depletion left %d true cells with no grid (instance %d)", record.surviving_true, index)
        if cfg.reproducer_dir:
            path = Path(cfg.reproducer_dir)
            path.mkdir(parents=True, exist_ok=True)
            (path / f"violation_{index:06d}.cnf").write_text(record.minimized_dimacs)
        return

    if verdict.satisfiable != oracle.satisfiable:
        raise OracleMismatch(f"solver says {verdict.status.value}, oracle says "
                             f"{'SAT' if oracle.satisfiable else 'UNSAT'}", f)
    if verdict.status is Status.SAT:
        if not check_model(f, verdict.witness.assignment):
            raise OracleMismatch("witness does not satisfy the formula", f)
        report.sat += 1
        report.backtracks_total += verdict.backtracks
        if verdict.backtracks == 0:
            report.sat_without_backtracks += 1
        if cfg.check_counts:
            grids = enumerate_grids(t, cfg.count_cap)
            if not grids.truncated:
                if grids.count != oracle.model_count:
                    raise OracleMismatch(f"{grids.count} grids vs {oracle.model_count} models", f)
                report.counts_checked += 1
    else:
        report.unsat += 1
        if not t.any_true():
            report.unsat_emptied += 1
    report.agreements += 1


def fuzz_instances(cfg: FuzzConfig) -> Iterator[tuple[int, int, CnfFormula]]:
    rng = random.Random(cfg.seed)
    for index in range(cfg.instances):
        seed = rng.randrange(2 ** 32)
        pick = random.Random(seed)
        n = pick.randint(max(cfg.min_vars, cfg.width), cfg.max_vars)
        m = pick.randint(1, min(cfg.max_clauses, clause_space(n, cfg.width, cfg.min_width)))
        yield index, seed, random_cnf(n, m, cfg.width, seed, cfg.min_width)


def fuzz_compare(cfg: FuzzConfig | None = None, corpus: Iterable[CnfFormula] | None = None) -> FuzzReport:
    """Cross-check the solver against brute force.

    Raises ``OracleMismatch`` on any SAT/UNSAT disagreement. CLAIM_VIOLATED
    instances are recorded with a minimized reproducer and do not fail the run.
    """
    cfg = cfg or FuzzConfig()
    report = FuzzReport(cfg)
    start = time.perf_counter()
    if corpus is None:
        stream = fuzz_instances(cfg)
    else:
        stream = ((k, cfg.seed, f) for k, f in enumerate(corpus))
    for index, seed, f in stream:
        check_instance(f, report, index, seed)
    report.elapsed = time.perf_counter() - start
    return report


# -- scaling ------------------------------------------------------------------

@dataclass
class ScalingRecord:
    l: int
    m: int
    K: int
    seed: int
    wall_time: float
    sweeps: int
    flips: int
    steps: int
    satisfiable_bit: bool

    def as_dict(self, timings: bool = True) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("wall_time")
        return d


def bench_scaling(ms: Iterable[int] = (10, 20, 40, 80), ratio: float = 4.0, width: int = 3,
                  repetitions: int = 5, seed: int = 0, schema: str = "worklist") -> list[ScalingRecord]:
    """Deplete random width-3 CNFs to fixpoint and record the work done."""
    records = []
    rng = random.Random(seed)
    for m in ms:
        n = max(width, round(m / ratio))
        while clause_space(n, width) < m:
            n += 1
        for _ in range(repetitions):
            s = rng.randrange(2 ** 32)
            f = random_cnf(n, m, width, s)
            t = build_compat_matrix(cnf_to_system(f))
            start = time.perf_counter()
            out = deplete(t, schema, inplace=True)
            elapsed = time.perf_counter() - start
            records.append(ScalingRecord(n, m, f.K, s, elapsed, out.sweeps, out.flips, out.steps,
                                         t.any_diagonal_true()))
    return records


def scaling_summary(records: list[ScalingRecord]) -> dict:
    """Per-m means and the least-squares slope of log(steps) and log(time) against log(m)."""
    by_m: dict[int, list[ScalingRecord]] = {}
    for r in records:
        by_m.setdefault(r.m, []).append(r)
    rows = []
    for m in sorted(by_m):
        rs = by_m[m]
        rows.append({
            "m": m,
            "mean_steps": float(np.mean([r.steps for r in rs])),
            "mean_sweeps": float(np.mean([r.sweeps for r in rs])),
            "mean_flips": float(np.mean([r.flips for r in rs])),
            "mean_time": float(np.mean([r.wall_time for r in rs])),
            "sat_bit_fraction": float(np.mean([r.satisfiable_bit for r in rs])),
        })
    out = {"per_m": rows, "steps_slope": None, "time_slope": None}
    if len(rows) >= 2:
        x = np.log([r["m"] for r in rows])
        out["steps_slope"] = float(np.polyfit(x, np.log([r["mean_steps"] for r in rows]), 1)[0])
        out["time_slope"] = float(np.polyfit(x, np.log([max(r["mean_time"], 1e-9) for r in rows]), 1)[0])
    return out

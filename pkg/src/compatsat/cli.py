"""Command line entry point: ``compatsat <command> [options] [input]``.

Exit status: 10 SAT, 20 UNSAT, 30 CLAIM-VIOLATED (true cells survived
depletion but no grid exists), 0 for commands without a verdict, 1 on errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .compat import build_compat_matrix
from .deplete import Schema, deplete
from .formula import CapacityError, DimacsError, NormalityError, cnf_to_system, parse_dimacs, require_normal
from .grids import Status, enumerate_grids
from .harness import FuzzConfig, OracleMismatch, bench_scaling, fuzz_compare, scaling_summary
from .pipeline import build_lex_matrix, cook_reduce, find_implicant, lex_xor_encode, solve_cnf, solve_system

EXIT_SAT, EXIT_UNSAT, EXIT_CLAIM, EXIT_ERROR = 10, 20, 30, 1
EXIT_CODES = {Status.SAT: EXIT_SAT, Status.UNSAT: EXIT_UNSAT, Status.CLAIM_VIOLATED: EXIT_CLAIM}
S_LINES = {Status.SAT: "s SATISFIABLE", Status.UNSAT: "s UNSATISFIABLE",
           Status.CLAIM_VIOLATED: "s UNKNOWN (CLAIM-VIOLATED)"}


class UsageError(Exception):
    pass


def _add_input(p):
    p.add_argument("input", nargs="?", default="-", help="DIMACS file, or - for stdin (default)")
    p.add_argument("--strict-dimacs", action="store_true", help="header mismatches are errors")
    p.add_argument("--repair", action="store_true", help="drop duplicate clauses and repeated literals")


def _add_schema(p):
    p.add_argument("--schema", choices=[s.value for s in Schema], default="worklist")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compatsat", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=["human", "structured"], default="human")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide satisfiability and print a witness")
    _add_input(p)
    _add_schema(p)
    p.add_argument("--early-stop", action=argparse.BooleanOptionalAction, default=True,
                   help="stop at the first all-false box (default on)")
    p.add_argument("--evidence", metavar="PATH", help="where to write CLAIM-VIOLATED evidence (JSON)")

    p = sub.add_parser("deplete", help="run depletion and report or trace it")
    _add_input(p)
    _add_schema(p)
    p.add_argument("--early-stop", action="store_true")
    p.add_argument("--trace", metavar="PATH", help="write one JSON record per step (- for stdout)")
    p.add_argument("--dump", metavar="PATH", help="write the depleted matrix snapshot as JSON")

    p = sub.add_parser("count", help="count solution grids (models over occurring variables)")
    _add_input(p)
    _add_schema(p)
    p.add_argument("--cap", type=int, default=100_000)

    p = sub.add_parser("reduce", help="split clauses to at most three literals, write DIMACS")
    _add_input(p)
    p.add_argument("-o", "--output", metavar="PATH", help="output file (default stdout)")

    p = sub.add_parser("lex", help="literal-level path: implicant search and exactly-one encoding")
    _add_input(p)
    _add_schema(p)

    p = sub.add_parser("fuzz", help="cross-check against brute force on random instances")
    p.add_argument("--instances", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-vars", type=int, default=3)
    p.add_argument("--max-vars", type=int, default=12)
    p.add_argument("--max-clauses", type=int, default=30)
    p.add_argument("--width", type=int, default=3)
    p.add_argument("--count", action="store_true", help="also compare grid counts with model counts")
    p.add_argument("--cap", type=int, default=5000)
    p.add_argument("--reproducers", metavar="DIR", help="save minimized reproducers here")
    _add_schema(p)

    p = sub.add_parser("bench", help="depletion work against the number of clauses")
    p.add_argument("--m", type=int, nargs="+", default=[10, 20, 40, 80])
    p.add_argument("--ratio", type=float, default=4.0)
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    _add_schema(p)
    return parser


def _read(args):
    if args.input == "-":
        text = sys.stdin.read()
    else:
        text = Path(args.input).read_text()
    return require_normal(parse_dimacs(text, args.strict_dimacs), args.repair)


class Out:
    """Result stream in one of the two formats; never mixes them."""

    def __init__(self, fmt: str, stream=None):
        self.structured = fmt == "structured"
        self.stream = stream or sys.stdout

    def human(self, line: str):
        if not self.structured:
            print(line, file=self.stream)

    def record(self, **fields):
        if self.structured:
            print(json.dumps(fields, sort_keys=True), file=self.stream)


def cmd_solve(args, out: Out) -> int:
    f = _read(args)
    sol = solve_cnf(f, args.schema, args.early_stop)
    v = sol.verdict
    out.human(S_LINES[v.status])
    record = {"status": v.status.value, "sweeps": sol.depletion.sweeps, "flips": sol.depletion.flips}
    if v.status is Status.SAT:
        for line in v.witness.v_lines():
            out.human(line)
        if v.witness.free_variables:
            out.human("c free variables " + " ".join(map(str, v.witness.free_variables)))
        record.update(witness=[x if val else -x for x, val in v.witness.assignment.items()],
                      free=v.witness.free_variables, backtracks=v.backtracks)
    elif v.status is Status.CLAIM_VIOLATED:
        path = Path(args.evidence or "claim_violated_evidence.json")
        path.write_text(json.dumps(v.evidence, indent=2, sort_keys=True))
        out.human(f"c evidence written to {path}")
        record["evidence"] = str(path)
    out.record(**record)
    return EXIT_CODES[v.status]


def cmd_deplete(args, out: Out) -> int:
    if args.trace == "-" and out.structured:
        raise UsageError("--trace - cannot share stdout with --format structured")
    f = _read(args)
    t = build_compat_matrix(cnf_to_system(f))
    res = deplete(t, args.schema, early_stop=args.early_stop, inplace=True, trace=bool(args.trace))
    if args.trace:
        lines = "".join(json.dumps(r.as_dict()) + "\n" for r in res.trace)
        if args.trace == "-":
            sys.stdout.write(lines)
        else:
            Path(args.trace).write_text(lines)
    if args.dump:
        Path(args.dump).write_text(json.dumps(t.snapshot(), sort_keys=True))
    fields = dict(m=t.m, sweeps=res.sweeps, flips=res.flips, steps=res.steps,
                  true_before=res.sweep_true_counts[0], true_after=t.true_count(),
                  pattern=list(res.early_stop) if res.early_stop else None,
                  stopped_early=res.stopped_early, diagonal_or=t.any_diagonal_true())
    for k, v in fields.items():
        out.human(f"{k:13s}{v}")
    out.record(**fields)
    return 0


def cmd_count(args, out: Out) -> int:
    f = _read(args)
    sol = solve_cnf(f, args.schema)
    grids = enumerate_grids(sol.compat, args.cap)
    if grids.truncated:
        out.human(f"more than {args.cap} grids (truncated)")
    else:
        out.human(str(grids.count))
    out.record(count=grids.count, truncated=grids.truncated, occurring_variables=len(f.occurring_variables()))
    return 0


def cmd_reduce(args, out: Out) -> int:
    red = cook_reduce(_read(args))
    text = red.to_dimacs()
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_lex(args, out: Out) -> int:
    f = _read(args)
    implicant = find_implicant(f)
    enc = lex_xor_encode(f)
    sol = solve_system(enc.system, args.schema)
    lex = build_lex_matrix(f)
    before = lex.compat.true_count()
    deplete(lex.compat, args.schema, inplace=True)
    survival = lex.compat.true_count() / before if before else 0.0
    if implicant is None:
        out.human("implicant    none")
    else:
        out.human("implicant    " + " & ".join(str(x) for x in implicant))
    out.human(f"encoding     {enc.system.m} equations over {enc.system.variable_count} indicators "
              f"({enc.exclusions} exclusions), verdict {sol.verdict.status.value}")
    out.human(f"lex survival {survival:.3f}")
    out.record(implicant=[x.to_int() for x in implicant] if implicant else None,
               encoded_status=sol.verdict.status.value, equations=enc.system.m,
               exclusions=enc.exclusions, lex_survival=survival)
    return EXIT_SAT if implicant is not None else EXIT_UNSAT


def cmd_fuzz(args, out: Out) -> int:
    cfg = FuzzConfig(instances=args.instances, seed=args.seed, min_vars=args.min_vars,
                     max_vars=args.max_vars, max_clauses=args.max_clauses, width=args.width,
                     schema=args.schema, check_counts=args.count, count_cap=args.cap,
                     reproducer_dir=args.reproducers)
    report = fuzz_compare(cfg)
    out.human(report.summary())
    if out.structured:
        out.stream.write(report.to_jsonl())
    return 0


def cmd_bench(args, out: Out) -> int:
    records = bench_scaling(args.m, args.ratio, 3, args.repetitions, args.seed, args.schema)
    summary = scaling_summary(records)
    for r in records:
        out.record(kind="record", **r.as_dict())
    out.record(kind="summary", **summary)
    out.human(f"{'m':>5} {'steps':>12} {'sweeps':>8} {'flips':>10} {'time(s)':>9}")
    for row in summary["per_m"]:
        out.human(f"{row['m']:5d} {row['mean_steps']:12.0f} {row['mean_sweeps']:8.1f} "
                  f"{row['mean_flips']:10.0f} {row['mean_time']:9.3f}")
    if summary["steps_slope"] is not None:
        out.human(f"log-log slope: steps {summary['steps_slope']:.2f}, time {summary['time_slope']:.2f}")
    return 0


COMMANDS = {"solve": cmd_solve, "deplete": cmd_deplete, "count": cmd_count, "reduce": cmd_reduce,
            "lex": cmd_lex, "fuzz": cmd_fuzz, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="c %(levelname)s %(message)s", stream=sys.stderr)
    out = Out(args.format)
    try:
        return COMMANDS[args.command](args, out)
    except (OSError, DimacsError, NormalityError, CapacityError, UsageError, ValueError, OracleMismatch) as exc:
        print(f"compatsat: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

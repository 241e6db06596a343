"""Input coercion shared by the estimator and the CLI."""
from __future__ import annotations

from os import PathLike
from pathlib import Path
from typing import Any, Sequence

from .formula import CnfFormula, parse_dimacs, require_normal


def check_cnf(X: Any, strict: bool = False, auto_repair: bool = False, normal: bool = True) -> CnfFormula:
    """Coerce one formula.

    Accepts a ``CnfFormula``, DIMACS text, a path to a DIMACS file, or a list
    of clauses given as signed integers.
    """
    if isinstance(X, CnfFormula):
        f = X
    elif isinstance(X, PathLike):
        f = parse_dimacs(Path(X).read_text(), strict)
    elif isinstance(X, str):
        f = parse_dimacs(X, strict)
    elif isinstance(X, Sequence) and all(isinstance(c, Sequence) and not isinstance(c, str) for c in X):
        f = CnfFormula.from_lists(X)
    else:
        raise TypeError(f"cannot interpret {type(X).__name__} as a CNF formula")
    if not f.clauses:
        raise ValueError("formula has no clauses")
    return require_normal(f, auto_repair) if normal else f


def check_cnf_batch(X: Any, **kwargs) -> list[CnfFormula]:
    """Coerce a batch; a single formula is not accepted here."""
    if isinstance(X, (CnfFormula, str, PathLike)):
        raise ValueError("expected a sequence of formulas, got a single formula")
    return [check_cnf(x, **kwargs) for x in X]

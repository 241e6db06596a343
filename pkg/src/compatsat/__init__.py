"""Compatibility-matrix depletion for Boolean systems and SAT, with a brute-force cross-check harness."""
from .boolmat import BoolMatrix, conjoin, is_all_false, product, transpose
from .compat import CompatMatrix, build_compat_matrix, rows_compatible, verify_symmetry
from .deplete import DepletionOutcome, Schema, deplete, deplete_step, detect_unsat_pattern
from .estimator import DepletionSolver
from .formula import (
    BooleanEquation,
    BooleanSystem,
    Clause,
    CnfFormula,
    Literal,
    cnf_to_system,
    parse_dimacs,
    satisfying_rows,
    to_dimacs,
    validate_normality,
)
from .grids import SolutionGrid, Status, Verdict, decide, enumerate_grids, find_grid, glue
from .pipeline import (
    build_lex_matrix,
    cook_reduce,
    find_implicant,
    lex_xor_encode,
    resolution_function,
    solve_cnf,
    solve_system,
)

__version__ = "0.1.0"

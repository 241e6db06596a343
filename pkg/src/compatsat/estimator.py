"""scikit-learn style wrapper around the depletion solver."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .deplete import Schema
from .grids import Status
from .pipeline import Solution, cook_reduce, solve_cnf
from .validation import check_cnf, check_cnf_batch

STATUS_CODES = {Status.SAT: 1, Status.UNSAT: 0, Status.CLAIM_VIOLATED: -1}


class DepletionSolver(TransformerMixin, BaseEstimator):
    """Decide CNF formulas by compatibility-matrix depletion plus grid search.

    ``predict`` maps each formula to 1 (SAT), 0 (UNSAT) or -1 (depletion left
    true cells without a grid). ``transform`` yields per-formula depletion
    statistics, one row per formula, columns as in ``get_feature_names_out``.

    Parameters
    ----------
    schema : {"worklist", "roundrobin", "reversed"}
    early_stop : bool
        Stop depleting at the first all-false box. Statistics then describe a
        partial run.
    reduce : bool
        Split clauses wider than three literals before building the matrix.
    auto_repair : bool
        Drop duplicate clauses and merged repeated literals instead of rejecting.
    max_vars : int or None
        Enumeration guard per equation.
    """

    _features = ("m", "K", "rows", "sweeps", "flips", "steps", "surviving_fraction", "status")

    def __init__(self, schema="worklist", early_stop=False, reduce=False, auto_repair=False, max_vars=None):
        self.schema = schema
        self.early_stop = early_stop
        self.reduce = reduce
        self.auto_repair = auto_repair
        self.max_vars = max_vars

    def _validate_params(self):
        Schema(self.schema)

    def solve(self, formula) -> Solution:
        self._validate_params()
        f = check_cnf(formula, auto_repair=self.auto_repair)
        if self.reduce:
            f = cook_reduce(f).reduced
        return solve_cnf(f, self.schema, self.early_stop, limit=self.max_vars)

    def fit(self, X, y=None):
        """Solve the given formulas and keep their solutions in ``solutions_``."""
        formulas = check_cnf_batch(X, auto_repair=self.auto_repair)
        self.solutions_ = [self.solve(f) for f in formulas]
        self.n_formulas_seen_ = len(formulas)
        return self

    def predict(self, X):
        return np.array([STATUS_CODES[self.solve(f).verdict.status]
                         for f in check_cnf_batch(X, auto_repair=self.auto_repair)], dtype=int)

    def transform(self, X):
        sols = [self.solve(f) for f in check_cnf_batch(X, auto_repair=self.auto_repair)]
        return self._stats(sols)

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y)._stats(self.solutions_)

    def _stats(self, solutions):
        rows = []
        for sol in solutions:
            t, out = sol.compat, sol.depletion
            start = out.sweep_true_counts[0]
            rows.append([
                t.m, max((len(r[0]) for r in t.row_tables if r), default=0), sum(t.sizes),
                out.sweeps, out.flips, out.steps,
                t.true_count() / start if start else 0.0,
                STATUS_CODES[sol.verdict.status],
            ])
        return np.array(rows, dtype=float).reshape(len(rows), len(self._features))

    def get_feature_names_out(self, input_features=None):
        return np.array(self._features, dtype=object)

    def score(self, X, y):
        """Fraction of formulas whose SAT/UNSAT label matches ``y`` (1/0)."""
        return float(np.mean(self.predict(X) == np.asarray(y)))

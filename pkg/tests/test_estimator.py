import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from compatsat import DepletionSolver
from compatsat.formula import CnfFormula, NormalityError
from compatsat.validation import check_cnf, check_cnf_batch

BATCH = [[[1], [-1]], [[1, 2], [-1, 2]], "p cnf 2 1\n1 2 0\n", CnfFormula.from_lists([[1, 2, 3, 4]])]


def test_params_round_trip():
    est = DepletionSolver(schema="roundrobin", early_stop=True)
    assert est.get_params()["schema"] == "roundrobin"
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    twin.set_params(schema="reversed")
    assert twin.schema == "reversed"


def test_predict_and_score():
    est = DepletionSolver()
    assert est.predict(BATCH).tolist() == [0, 1, 1, 1]
    assert est.score(BATCH, [0, 1, 1, 1]) == 1.0
    assert DepletionSolver(reduce=True).predict(BATCH).tolist() == [0, 1, 1, 1]


def test_fit_transform_consistent():
    est = DepletionSolver()
    a = est.fit_transform(BATCH)
    b = est.transform(BATCH)
    assert a.shape == (4, len(est.get_feature_names_out()))
    np.testing.assert_array_equal(a[:, :-2], b[:, :-2])
    assert est.n_formulas_seen_ == 4
    assert a[0, 6] == 0.0 and a[0, 7] == 0


def test_composes_with_pipeline():
    pipe = make_pipeline(DepletionSolver(), StandardScaler())
    out = pipe.fit_transform(BATCH)
    assert out.shape[0] == 4


def test_validation_helpers(tmp_path):
    path = tmp_path / "f.cnf"
    path.write_text("p cnf 1 1\n1 0\n")
    assert check_cnf(path).to_lists() == [[1]]
    with pytest.raises(TypeError):
        check_cnf(3)
    with pytest.raises(ValueError):
        check_cnf([])
    with pytest.raises(NormalityError):
        check_cnf([[1], [1]])
    assert check_cnf([[1], [1]], auto_repair=True).m == 1
    with pytest.raises(ValueError):
        check_cnf_batch("p cnf 1 1\n1 0\n")
    with pytest.raises(ValueError):
        DepletionSolver(schema="bogus").predict(BATCH)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_nominal
from fsforge.data import (AttributeSpec, Dataset, DataError, ParseError, dump_arff, impute_missing,
                          load_arff, load_csv, load_lung_cancer, stratified_folds)

SMALL_ARFF = b"""% toy
@relation toy
@attribute outlook {sunny, rainy}
@attribute temp numeric
@attribute play {yes, no}
@data
sunny, 21.5, yes
rainy, ?, no
"""


def test_load_arff_small():
    d = load_arff(SMALL_ARFF)
    assert len(d) == 2
    assert d.n_features == 2
    assert d.class_domain == ("yes", "no")
    assert d.schema[0].values == ("sunny", "rainy")
    assert d.schema[1].kind == "numeric"
    assert np.isnan(d.X[1, 1])
    assert not d.synthetic.any()
    assert d.instance(0).values == (0, 21.5)
    assert d.instance(1).origin == "original"


def test_load_arff_class_index_override():
    d = load_arff(SMALL_ARFF.replace(b"temp numeric", b"temp {a,b}").replace(b"21.5", b"a"), 0)
    assert d.class_domain == ("sunny", "rainy")
    assert d.feature_names == ["temp", "play"]


@pytest.mark.parametrize("text, line", [
    (b"@relation r\n@attribute a {x,y}\n@attribute c {p,q}\n@attribute bad\n@data\n", 4),
    (b"@relation r\n@attribute a {x,y}\n@attribute c {p,q}\n@data\nx,p,p\n", 5),
    (b"@relation r\n@attribute a {x,y}\n@attribute c {p,q}\n@data\nx,p\nz,q\n", 6),
])
def test_load_arff_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as err:
        load_arff(text)
    assert err.value.line == line


def test_load_csv_shape():
    d = load_csv(b"1,a,x\n2,b,y\n3,a,x\n4,b,y\n", class_column=2)
    assert len(d) == 4 and d.n_features == 2
    assert d.schema[0].kind == "numeric"
    assert d.schema[1].values == ("a", "b")


def test_load_csv_kind_inference():
    d = load_csv(b"0,p\n1,q\n2,p\n", class_column=1)
    assert d.schema[0].kind == "numeric"


def test_load_csv_declared_nominal_with_missing():
    d = load_csv(b"0,p\n1,q\n?,p\n", class_column=1, declared_kinds=["nominal", None])
    assert d.schema[0].kind == "nominal"
    assert d.schema[0].values == ("0", "1")
    assert np.isnan(d.X[:, 0]).sum() == 1


@pytest.mark.parametrize("text", [b"", b"1,2,3\n1,2\n"])
def test_load_csv_errors(text):
    with pytest.raises(ParseError):
        load_csv(text)


def test_attribute_invariants():
    with pytest.raises(DataError):
        AttributeSpec("a", "nominal", ())
    with pytest.raises(DataError):
        AttributeSpec("a", "nominal", ("x", "x"))
    with pytest.raises(DataError):
        Dataset((AttributeSpec("a", "nominal", ("x",)),) * 2, ("p", "q"), np.zeros((1, 2)), [0])
    with pytest.raises(DataError):
        Dataset((AttributeSpec("a", "nominal", ("x",)),), ("p",), np.zeros((1, 1)), [0])


def test_impute_mode_within_class():
    d = make_nominal([[0], [0], [np.nan], [1]], [0, 0, 0, 0])
    out = impute_missing(d)
    assert out.X[2, 0] == 0
    assert not out.has_missing()


def test_impute_tie_lowest_index_and_numeric_mean():
    d = Dataset((AttributeSpec("a", "nominal", ("u", "v")), AttributeSpec("b", "numeric")),
                ("p", "q"), [[1, 1.0], [0, 3.0], [np.nan, np.nan], [1, 10.0]], [0, 0, 0, 1])
    out = impute_missing(d)
    assert out.X[2, 0] == 0
    assert out.X[2, 1] == pytest.approx(2.0)


def test_impute_falls_back_to_global():
    d = make_nominal([[1], [1], [0], [np.nan]], [0, 0, 0, 1], width=2)
    assert impute_missing(d).X[3, 0] == 1


def test_impute_identity_without_missing():
    d = make_nominal([[0], [1]], [0, 1])
    assert impute_missing(d) == d


def test_stratified_folds_perfect_split():
    d = make_nominal(np.zeros(10), [0] * 5 + [1] * 5, width=1)
    plan = stratified_folds(d, 5, seed=3)
    for f in range(5):
        members = d.y[plan.assignments == f]
        assert sorted(members.tolist()) == [0, 1]


def test_stratified_folds_deterministic_and_errors():
    d = make_nominal(np.zeros(10), [0] * 5 + [1] * 5, width=1)
    a = stratified_folds(d, 5, seed=11)
    b = stratified_folds(d, 5, seed=11)
    assert np.array_equal(a.assignments, b.assignments)
    with pytest.raises(DataError):
        stratified_folds(d, 11, 0)
    with pytest.raises(DataError):
        stratified_folds(d, 1, 0)


@settings(max_examples=60, deadline=None)
@given(counts=st.lists(st.integers(1, 15), min_size=2, max_size=4),
       k=st.integers(2, 10), seed=st.integers(0, 2**32))
def test_stratification_property(counts, k, seed):
    y = np.repeat(np.arange(len(counts)), counts)
    if k > len(y):
        return
    d = make_nominal(np.zeros(len(y)), y, width=1)
    plan = stratified_folds(d, k, seed)
    assert plan.assignments.min() >= 0 and plan.assignments.max() < k
    for c in range(len(counts)):
        per_fold = np.bincount(plan.assignments[y == c], minlength=k)
        assert per_fold.max() - per_fold.min() <= 1


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_arff_round_trip(data):
    n = data.draw(st.integers(1, 8))
    width = data.draw(st.integers(1, 4))
    cells = data.draw(st.lists(st.lists(st.one_of(st.integers(0, width - 1), st.none()),
                                        min_size=2, max_size=2), min_size=n, max_size=n))
    nums = data.draw(st.lists(st.one_of(st.floats(-1e6, 1e6, allow_nan=False), st.none()),
                              min_size=n, max_size=n))
    y = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    X = [[np.nan if c is None else c for c in row] + [np.nan if v is None else v]
         for row, v in zip(cells, nums)]
    schema = (AttributeSpec("a b", "nominal", tuple(f"v{k}" for k in range(width))),
              AttributeSpec("c", "nominal", tuple(f"w {k}" for k in range(width))),
              AttributeSpec("n", "numeric"))
    d = Dataset(schema, ("yes", "no"), X, y, relation="rt")
    back = load_arff(dump_arff(d))
    assert back == d
    assert back.relation == "rt"


LUNG_COUNTS = {"1": 9, "2": 13, "3": 10}


def test_lung_cancer_shape(lung_path):
    d = load_lung_cancer(lung_path)
    assert len(d) == 32 and d.n_features == 56 and d.n_classes == 3
    assert d.class_count_map() == LUNG_COUNTS


def test_lung_cancer_imputation(lung_path):
    raw = load_lung_cancer(lung_path)
    with open(lung_path) as fh:
        rows = [line.strip().split(",") for line in fh if line.strip()]
    missing = {(i, j - 1) for i, r in enumerate(rows) for j, c in enumerate(r) if c == "?"}
    assert missing and {j for _, j in missing} <= {4, 38}
    assert {(int(i), int(j)) for i, j in zip(*np.nonzero(np.isnan(raw.X)))} == missing
    assert not impute_missing(raw).has_missing()


def test_lung_cancer_folds(lung_path):
    d = impute_missing(load_lung_cancer(lung_path))
    plan = stratified_folds(d, 10, 1)
    for c in range(3):
        per_fold = np.bincount(plan.assignments[d.y == c], minlength=10)
        assert per_fold.max() - per_fold.min() <= 1

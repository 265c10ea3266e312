import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kbmf.io import build_tight_instance
from kbmf.matrix import BinaryMatrix, Factorisation, boolean_product
from kbmf.objective import frobenius_error, rho_error
from kbmf.preprocess import WeightedBinaryMatrix, expand, reduce, restrict

from conftest import random_matrix


def planted(rng, n=8, m=6, missing=0.0) -> BinaryMatrix:
    """Random matrix with duplicated rows/columns and an all-zero row."""
    base = random_matrix(rng, max(2, n // 2), max(2, m // 2), missing=missing).to_array()
    rows = rng.integers(0, base.shape[0], n)
    cols = rng.integers(0, base.shape[1], m)
    arr = base[np.ix_(rows, cols)]
    arr[rng.integers(0, n)] = 0
    return BinaryMatrix.from_array(arr)


def test_tight_matrix_reduces_to_three_by_three():
    X = build_tight_instance(2).original()
    assert X.shape == (7, 7)
    w = reduce(X)
    assert w.core.ones.astype(int).tolist() == [[1, 1, 0], [1, 0, 1], [0, 1, 1]]
    assert w.row_weights.tolist() == [3, 1, 3]
    assert w.col_weights.tolist() == [3, 1, 3]


def test_distinct_rows_are_kept(three_by_three):
    w = reduce(three_by_three)
    assert w.core == three_by_three
    assert w.is_unit


def test_round_trip_on_planted_duplicates(rng):
    for _ in range(30):
        X = planted(rng, missing=0.1)
        if not X.ones.any():
            continue
        w = reduce(X)
        assert w.original() == X
        assert w.row_weights.sum() <= X.n
        # no duplicate rows or columns in the core, missing treated as a symbol
        codes = w.core.to_array()
        assert len({r.tobytes() for r in codes}) == codes.shape[0]
        assert len({c.tobytes() for c in codes.T}) == codes.shape[1]


def test_weights_count_nonzero_rows():
    X = BinaryMatrix.from_array([[1, 0, 1], [1, 0, 1], [0, 0, 0], [0, 1, 0]])
    w = reduce(X)
    assert int(w.row_weights.sum()) == 3
    assert int(w.col_weights.sum()) == 3
    assert w.row_map.tolist() == [0, 0, -1, 1]


def test_missing_is_a_third_symbol():
    # rows (1,0) and (1,?) stay apart
    X = BinaryMatrix.from_array([[1, 0], [1, -1], [0, 1]])
    assert reduce(X).core.shape == (3, 2)


def test_reduce_rejects_degenerate_matrices():
    with pytest.raises(ValueError):
        reduce(BinaryMatrix.from_array([[-1, -1]]))
    with pytest.raises(ValueError):
        reduce(BinaryMatrix.from_array([[0, 0]]))


def test_reduce_is_idempotent(rng):
    for _ in range(20):
        X = planted(rng, missing=0.1)
        if not X.ones.any():
            continue
        w = reduce(X)
        again = reduce(w.core)
        assert again.is_unit
        assert again.core == w.core


def test_expand_of_tight_solution_has_error_one():
    w = build_tight_instance(2)
    f = Factorisation([[1, 0], [1, 1], [0, 1]], [[1, 1, 0], [0, 1, 1]])
    g = expand(w, f)
    assert g.shape == (7, 7)
    assert frobenius_error(w.original(), boolean_product(g)) == 1


def test_identity_reduction_expand_is_identity(three_by_three):
    w = WeightedBinaryMatrix.unweighted(three_by_three)
    f = Factorisation([[1, 0], [1, 1], [0, 1]], [[1, 1, 0], [0, 1, 1]])
    assert expand(w, f) == f
    assert restrict(w, f) == f


def test_expand_shape_mismatch(three_by_three):
    with pytest.raises(ValueError):
        expand(reduce(three_by_three), Factorisation(np.ones((2, 1)), np.ones((1, 3))))


@given(st.integers(0, 2 ** 31 - 1), st.sampled_from([1, 2, 3]), st.sampled_from(["1", "1/2", "1/3", "2"]))
def test_weighted_objective_equivalence(seed, k, rho):
    rng = np.random.default_rng(seed)
    X = planted(rng, missing=0.1)
    if not X.ones.any():
        return
    w = reduce(X)
    n, m = w.core.shape
    f = Factorisation(rng.integers(0, 2, (n, k)), rng.integers(0, 2, (k, m)))
    g = expand(w, f)
    weights = (w.row_weights, w.col_weights)
    assert frobenius_error(w.core, boolean_product(f), weights) == frobenius_error(X, boolean_product(g))
    assert rho_error(w.core, f, rho, weights) == rho_error(X, g, rho)


def test_restrict_inverts_expand(rng):
    for _ in range(20):
        X = planted(rng)
        if not X.ones.any():
            continue
        w = reduce(X)
        n, m = w.core.shape
        f = Factorisation(rng.integers(0, 2, (n, 2)), rng.integers(0, 2, (2, m)))
        assert restrict(w, expand(w, f)) == f

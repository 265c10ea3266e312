import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kbmf.matrix import (BinaryMatrix, Factorisation, Rank1Pattern, boolean_product, covers_count,
                         patterns_to_factorisation, zero_factorisation)

from conftest import matrix, six_rectangles


def test_exact_product_of_small_example(three_by_three):
    f = Factorisation([[1, 0], [1, 1], [0, 1]], [[1, 1, 0], [0, 1, 1]])
    assert boolean_product(f) == three_by_three


def test_zero_factor_gives_zero_product():
    f = Factorisation(np.zeros((4, 3), int), np.ones((3, 5), int))
    assert not boolean_product(f).ones.any()


def test_product_matches_clamped_integer_product(rng):
    for _ in range(20):
        A = rng.integers(0, 2, (5, 3))
        B = rng.integers(0, 2, (3, 4))
        Z = boolean_product(Factorisation(A, B))
        assert np.array_equal(Z.ones, np.minimum(1, A @ B) == 1)


@given(arrays(np.int8, (5, 3), elements=st.integers(0, 1)), arrays(np.int8, (3, 4), elements=st.integers(0, 1)),
       st.permutations(range(3)))
def test_product_invariant_under_factor_permutation(A, B, perm):
    p = list(perm)
    assert boolean_product(Factorisation(A, B)) == boolean_product(Factorisation(A[:, p], B[p, :]))


@given(arrays(np.int8, (4, 3), elements=st.integers(0, 1)), arrays(np.int8, (3, 5), elements=st.integers(0, 1)))
def test_boolean_product_below_integer_product(A, B):
    P = A.astype(int) @ B.astype(int)
    Z = boolean_product(Factorisation(A, B)).ones.astype(int)
    assert np.all(Z <= P)
    assert np.array_equal(Z == P, P <= 1)


def test_matrix_invariants():
    with pytest.raises(ValueError):
        BinaryMatrix(np.ones((0, 3), bool), np.zeros((0, 3), bool))
    with pytest.raises(ValueError):
        BinaryMatrix(np.ones((2, 2), bool), np.ones((2, 2), bool))
    with pytest.raises(ValueError):
        BinaryMatrix.from_array([[0, 2]])
    X = matrix(["1?0"])
    assert X.ones.tolist() == [[True, False, False]]
    assert X.zeros.tolist() == [[False, False, True]]
    assert X.missing.tolist() == [[False, True, False]]


def test_matrix_is_immutable(three_by_three):
    with pytest.raises(ValueError):
        three_by_three.ones[0, 0] = False


def test_pattern_rejects_zero_vectors():
    with pytest.raises(ValueError):
        Rank1Pattern(np.zeros(3, bool), np.ones(2, bool))
    with pytest.raises(ValueError):
        Rank1Pattern(np.ones(3, bool), np.zeros(2, bool))


def test_pattern_support_and_identity():
    p = Rank1Pattern.from_rows_cols(3, 4, [0, 2], [1])
    assert p.support().sum() == 2 and p.covers(2, 1) and not p.covers(1, 1)
    assert p == Rank1Pattern.from_rows_cols(3, 4, [2, 0], [1])
    assert len({p, Rank1Pattern.from_rows_cols(3, 4, [0, 2], [1])}) == 1


def test_factorisation_shape_checks():
    with pytest.raises(ValueError):
        Factorisation(np.zeros((3, 2)), np.zeros((3, 4)))
    with pytest.raises(ValueError):
        Factorisation(np.full((2, 1), 2), np.zeros((1, 2)))
    with pytest.raises(ValueError):
        Factorisation(np.zeros((2, 0)), np.zeros((0, 2)))


def test_padding_to_rank_k():
    p = Rank1Pattern(np.array([1, 1, 0], bool), np.array([1, 1, 0], bool))
    f = patterns_to_factorisation([p], [0], 2)
    assert f.k == 2
    assert f.A[:, 0].tolist() == [True, True, False]
    assert not f.A[:, 1].any() and not f.B[1].any()


def test_empty_selection_is_zero_factorisation():
    p = Rank1Pattern.from_rows_cols(2, 2, [0], [0])
    f = patterns_to_factorisation([p], [], 1)
    assert f == zero_factorisation(2, 2, 1)


def test_selection_errors():
    p = Rank1Pattern.from_rows_cols(2, 2, [0], [0])
    with pytest.raises(IndexError):
        patterns_to_factorisation([p], [1], 2)
    with pytest.raises(ValueError):
        patterns_to_factorisation([p, p], [0, 1], 1)


def test_union_of_selected_rectangles(j4_minus_i4):
    pool = six_rectangles()
    for sel in ([0, 1, 2], [1, 3, 5], [0, 4, 5], [2, 3, 4]):
        Z = boolean_product(patterns_to_factorisation(pool, sel, 3)).ones
        union = np.zeros((4, 4), bool)
        for s in sel:
            for i in range(4):
                for j in range(4):
                    union[i, j] |= pool[s].covers(i, j)
        assert np.array_equal(Z, union)


def test_cover_counts():
    pool = [Rank1Pattern.from_rows_cols(3, 3, [0], [0]), Rank1Pattern.from_rows_cols(3, 3, [1, 2], [1, 2])]
    assert covers_count(pool, [0, 1], (0, 0)) == 1
    assert covers_count(pool, [0, 1], (2, 2)) == 1
    assert covers_count(pool, [0, 1], (0, 2)) == 0
    # the two rectangles of the tight k=2 construction overlap in the middle cell
    z2 = [Rank1Pattern.from_rows_cols(3, 3, [0, 1], [0, 1]), Rank1Pattern.from_rows_cols(3, 3, [1, 2], [1, 2])]
    assert covers_count(z2, [0, 1], (1, 1)) == 2


def test_cover_counts_against_membership_loop(rng):
    pool = [Rank1Pattern(rng.random(5) < 0.5 + np.eye(5, dtype=bool)[t % 5], rng.random(4) < 0.5 + np.eye(4, dtype=bool)[t % 4])
            for t in range(6)]
    sel = [0, 2, 3, 5]
    for i in range(5):
        for j in range(4):
            expect = sum(1 for s in sel if pool[s].a[i] and pool[s].b[j])
            assert covers_count(pool, sel, (i, j)) == expect

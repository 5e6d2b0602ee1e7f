import itertools
import math
from functools import lru_cache

import numpy as np
import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gkz.errors import RankMismatchError, ShapeError
from gkz.lattice import (
    IntegerMatrix,
    check_orthogonality,
    determinant,
    hermite_normal_form,
    integer_kernel_basis,
    is_generating,
    is_unimodular,
    random_unimodular,
    smith_invariants,
)


def M(rows, ncols=None):
    return IntegerMatrix.from_rows(rows, ncols)


# ---------------------------------------------------------------- examples

@pytest.mark.parametrize(
    "A, expected",
    [
        ([[1, 1]], [[1, -1]]),
        ([[1, -1, 0], [0, 1, -1]], [[1, 1, 1]]),
        ([[1, -1]], [[1, 1]]),
    ],
)
def test_kernel_examples(A, expected):
    assert integer_kernel_basis(M(A)).to_list() == expected


def test_kernel_square_full_rank_is_empty():
    K = integer_kernel_basis(M([[2, 1], [1, 1]]))
    assert K.rows == 0 and K.cols == 2


def test_kernel_rank_deficient_raises():
    with pytest.raises(RankMismatchError):
        integer_kernel_basis(M([[1, 2], [2, 4]]))


def test_kernel_no_rows_is_identity():
    assert integer_kernel_basis(IntegerMatrix.empty(3)) == IntegerMatrix.identity(3)


def test_orthogonality_examples():
    assert check_orthogonality(M([[1, 1]]), M([[1, -1]]))
    assert not check_orthogonality(M([[1, 0]]), M([[1, 1]]))
    with pytest.raises(ShapeError):
        check_orthogonality(M([[1, 0]]), M([[1, 1, 1]]))


def test_gz2_orthogonality():
    A = M([[1, 0, 0, -1, 0, 0], [0, 1, 1, 0, -1, -1], [1, 0, 1, 0, 0, -1]])
    L = M([[1, 0, -1, 1, -1, 0], [0, 1, 0, 0, 1, 0], [0, 0, 1, 0, 0, 1]])
    assert check_orthogonality(A, L)


def test_is_generating_examples():
    assert not is_generating(M([[2]]))
    assert is_generating(M([[1, 1]]))
    assert is_generating(M([[1, -1, 0], [0, 1, -1]]))
    assert not is_generating(M([[2, 0], [0, 1]]))


def test_smith_invariants_match_sympy():
    from sympy.matrices.normalforms import smith_normal_form

    for rows in ([[2, 4], [6, 8]], [[1, 2, 3], [4, 5, 6]], [[6, 0], [0, 4]], [[0, 3], [3, 0]]):
        ours = smith_invariants(M(rows))
        snf = smith_normal_form(sympy.Matrix(rows), domain=sympy.ZZ)
        theirs = tuple(abs(int(snf[i, i])) for i in range(min(snf.shape)) if snf[i, i] != 0)
        assert ours == theirs


def test_matrix_construction_rules():
    with pytest.raises(ShapeError):
        M([[1, 2], [3]])
    with pytest.raises(ShapeError):
        M([[1.5]])
    with pytest.raises(ShapeError):
        IntegerMatrix.empty(0)
    assert M([[1, 2], [2, 4]]).rank == 1


def test_random_unimodular_examples():
    for seed in range(5):
        assert random_unimodular(1, seed).to_list() in ([[1]], [[-1]])
    g = random_unimodular(2, 0)
    assert abs(determinant(g)) == 1
    h = random_unimodular(3, 7) @ random_unimodular(3, 8)
    assert is_unimodular(h)
    assert random_unimodular(4, 11) == random_unimodular(4, 11)


def test_determinant_against_sympy():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        rows = rng.integers(-5, 6, size=(n, n)).tolist()
        assert determinant(M(rows)) == int(sympy.Matrix(rows).det())


# -------------------------------------------------------------- properties

@lru_cache(maxsize=None)
def _box(N: int, bound: int = 4) -> np.ndarray:
    return np.array(list(itertools.product(range(-bound, bound + 1), repeat=N)), dtype=np.int64)


def _in_row_lattice(K: IntegerMatrix, vecs: np.ndarray) -> bool:
    """Exact-enough membership via the echelon pivots of the HNF basis."""
    if len(vecs) == 0:
        return True
    H = np.array(K.entries, dtype=float)
    pivots = [int(np.flatnonzero(row)[0]) for row in H]
    coeffs = np.linalg.solve(H[:, pivots].T, vecs[:, pivots].T.astype(float))
    if not np.allclose(coeffs, np.round(coeffs), atol=1e-9):
        return False
    return np.array_equal(np.round(coeffs).T.astype(np.int64) @ np.array(K.entries, dtype=np.int64), vecs)


def _max_minor_gcd(A: list[list[int]]) -> int:
    m, N = len(A), len(A[0])
    g = 0
    for cols in itertools.combinations(range(N), m):
        g = math.gcd(g, int(sympy.Matrix([[r[c] for c in cols] for r in A]).det()))
    return g


small_matrices = st.integers(1, 6).flatmap(
    lambda N: st.integers(1, min(3, N)).flatmap(
        lambda m: st.lists(
            st.lists(st.integers(-3, 3), min_size=N, max_size=N), min_size=m, max_size=m
        )
    )
)


@settings(max_examples=100)
@given(small_matrices)
def test_kernel_is_primitive_against_brute_force(rows):
    A = M(rows)
    assume(A.rank == A.rows)
    K = integer_kernel_basis(A)
    assert K.rows == A.cols - A.rows
    if K.rows:
        assert check_orthogonality(A, K)
        assert K.rank == K.rows
        assert hermite_normal_form(K) == K
    box = _box(A.cols)
    hits = box[~(box @ np.array(rows, dtype=np.int64).T).any(axis=1)]
    if K.rows == 0:
        assert not hits.any()
    else:
        assert _in_row_lattice(K, hits)


@settings(max_examples=100)
@given(small_matrices)
def test_is_generating_against_brute_force(rows):
    A = M(rows)
    assume(A.rank == A.rows)
    m = A.rows
    images = _box(A.cols) @ np.array(rows, dtype=np.int64).T
    found = all(
        ((images == np.eye(m, dtype=np.int64)[s]).all(axis=1)).any() for s in range(m)
    )
    gen = is_generating(A)
    # bounded search can only miss solutions, never invent them
    if found:
        assert gen
    # exact oracle: the columns generate Z^m iff the maximal minors are coprime
    assert gen == (_max_minor_gcd(rows) == 1)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_random_unimodular_has_unit_determinant(n, seed):
    g = random_unimodular(n, seed)
    assert abs(determinant(g)) == 1
    assert max(abs(x) for row in g for x in row) <= 3**(3 * n)


@given(small_matrices)
def test_hnf_transform_is_unimodular(rows):
    A = M(rows)
    H, U = hermite_normal_form(A, with_transform=True)
    assert U @ A == H
    assert is_unimodular(U)

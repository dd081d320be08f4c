import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from floerkit.exactalg import (
    GF,
    QQ,
    ZZ,
    Coefficients,
    GradedSpace,
    MalformedComplexError,
    cohomology_of_pair,
    fmt,
    int_det,
    integral_cohomology,
    inverse,
    kernel_image_ranks,
    nullspace,
    rank,
    smith_normal_form,
    solve,
)

small_ints = st.integers(-6, 6)


def int_matrices(max_r=4, max_c=4):
    return st.integers(1, max_r).flatmap(
        lambda r: st.integers(1, max_c).flatmap(lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r))
    )


# -- Smith normal form -----------------------------------------------------------------------


def test_snf_vectors():
    s = smith_normal_form([[2]])
    assert s.diagonal == [2] and s.U.tolist() == [[1]] and s.V.tolist() == [[1]]
    assert smith_normal_form([[0]]).diagonal == [0]
    assert smith_normal_form([[2, 4], [6, 8]]).diagonal == [2, 4]


@settings(max_examples=150, deadline=None)
@given(int_matrices(5, 5))
def test_snf_against_sympy(rows):
    A = np.array(rows, dtype=object)
    s = smith_normal_form(A)
    # U A V = D with unimodular U, V
    assert np.array_equal(s.U.dot(A).dot(s.V), s.D)
    assert abs(int_det(s.U)) == 1 and abs(int_det(s.V)) == 1
    diag = s.diagonal
    for a, b in zip(diag, diag[1:]):
        assert (a == 0 and b == 0) or (a != 0 and b % a == 0)
    ref = sympy_snf(sympy.Matrix(rows), domain=sympy.ZZ)
    want = [abs(int(ref[i, i])) for i in range(min(ref.shape))]
    assert diag == want


def test_int_det_matches_sympy():
    rng = np.random.default_rng(0)
    for _ in range(30):
        n = int(rng.integers(1, 6))
        A = rng.integers(-5, 6, size=(n, n))
        assert int_det(A.astype(object)) == int(sympy.Matrix(A.tolist()).det())


# -- field linear algebra --------------------------------------------------------------------


def test_rank_vectors():
    ki = kernel_image_ranks(QQ.eye(3), QQ)
    assert (ki.rank, ki.nullity) == (3, 0)
    ki = kernel_image_ranks(GF(2).zeros(2, 3), GF(2))
    assert (ki.rank, ki.nullity) == (0, 3)
    ki = kernel_image_ranks(GF(2).asarray([[1, 1], [1, 1]]), GF(2))
    assert ki.rank == 1 and ki.kernel.reshape(-1).tolist() == [1, 1]


def _brute_rank_mod_p(rows, p):
    # size of the row space, by enumeration
    A = np.array(rows, dtype=np.int64) % p
    span = {tuple(np.dot(c, A) % p) for c in itertools.product(range(p), repeat=A.shape[0])}
    r = 0
    while p**r < len(span):
        r += 1
    return r


@settings(max_examples=120, deadline=None)
@given(int_matrices(4, 4), st.sampled_from([2, 3, 5]))
def test_rank_mod_p_against_enumeration(rows, p):
    K = GF(p)
    A = K.asarray(rows)
    assert rank(A, K) == _brute_rank_mod_p(rows, p)
    N = nullspace(A, K)
    assert K.is_zero(K.matmul(A, N)) if N.size else True
    assert N.shape[1] == A.shape[1] - rank(A, K)


@settings(max_examples=120, deadline=None)
@given(int_matrices(5, 5))
def test_rank_q_against_sympy(rows):
    A = QQ.asarray(rows)
    assert rank(A, QQ) == sympy.Matrix(rows).rank()


def test_solve_and_inverse():
    A = QQ.asarray([[2, 1], [1, 1]])
    X = inverse(A, QQ)
    assert np.array_equal(QQ.matmul(A, X), QQ.eye(2))
    assert solve(QQ.asarray([[1, 1], [1, 1]]), QQ.asarray([[1], [0]]), QQ) is None
    K = GF(3)
    B = K.asarray([[1, 2], [0, 1]])
    assert np.array_equal(K.matmul(B, inverse(B, K)), K.eye(2))


def test_coefficients():
    assert Coefficients.from_characteristic(0) == QQ
    assert Coefficients.from_characteristic(7).p == 7
    with pytest.raises(ValueError):
        GF(4)
    assert GF(5).inv(2) == 3
    assert QQ.scalar(Fraction(1, 2)) == Fraction(1, 2)


# -- cohomology of a pair --------------------------------------------------------------------


def test_pair_vectors():
    s = cohomology_of_pair(ZZ.asarray([[2]]), ZZ.zeros(0, 1), ZZ, n=1)
    assert s.rank == 0 and s.torsion == (2,)
    assert str(s) == "Z/2"
    assert cohomology_of_pair(QQ.zeros(3, 0), QQ.zeros(0, 3), QQ, n=3).rank == 3
    s = cohomology_of_pair(QQ.asarray([[1], [1]]), QQ.asarray([[1, -1]]), QQ, n=2)
    assert s.rank == 0


def test_pair_rejects_nonzero_composite():
    with pytest.raises(MalformedComplexError):
        cohomology_of_pair(QQ.asarray([[1], [0]]), QQ.asarray([[1, 0]]), QQ, n=2)


def test_integral_cohomology_generators():
    # Z --(2,0)--> Z^2 --0--> : H = Z/2 + Z
    H = integral_cohomology(ZZ.asarray([[2], [0]]), ZZ.zeros(0, 2), 2)
    assert H.summary.rank == 1 and H.summary.torsion == (2,)
    free, tors = H.coords(np.array([1, 0], dtype=object))
    assert tors == [1]
    free, tors = H.coords(np.array([2, 0], dtype=object))
    assert tors == [0]


def test_graded_space_and_fmt():
    G = GradedSpace.from_degrees(Fraction(1, 4), [(Fraction(-7, 4), 1), (Fraction(1, 4), 2)])
    assert G.dim(Fraction(1, 4)) == 2 and G.total == 3
    with pytest.raises(ValueError):
        G.dim(0)
    assert fmt(Fraction(-3, 6)) == "-1/2" and fmt(4) == "4"

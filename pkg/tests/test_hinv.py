from fractions import Fraction

import numpy as np
import pytest

from floerkit.hinv import (
    BoundarySpec,
    DiagonalLattice,
    LatticeError,
    additivity_check,
    chamber_form_check,
    char_vector_max,
    d_to_h,
    froyshov_check,
    h_to_d,
    lens_counterexamples,
    lens_h_table,
    negative_definite_e8,
)

F = Fraction


def test_lens_tables():
    assert lens_h_table(2) == [F(1, 8), F(-1, 8)]
    assert lens_h_table(3) == [F(1, 4), F(-1, 12), F(-1, 12)]
    assert lens_h_table(4) == [F(3, 8), F(0), F(-1, 8), F(0)]
    with pytest.raises(ValueError):
        lens_h_table(1)


def test_lens_table_symmetry():
    # s_j and s_{q-j} are conjugate
    for q in range(2, 12):
        t = lens_h_table(q)
        assert all(t[j] == t[q - j] for j in range(1, q))


def test_d_conversion():
    assert h_to_d(F(1, 4)) == F(-1, 2)
    assert d_to_h(h_to_d(F(-7, 12))) == F(-7, 12)


def test_froyshov_vectors():
    # Poincare sphere bounding -E8
    r = froyshov_check(BoundarySpec((("P", -1),), 8, -8, 0))
    assert r.satisfied and r.equality and r.negative_definite
    assert (r.lhs, r.rhs) == (1, 1)
    r = froyshov_check(BoundarySpec((("S3", 0),), 1, -1, -1))
    assert r.satisfied and r.equality and (r.lhs, r.rhs) == (0, 0)
    r = froyshov_check(BoundarySpec((("Y", -2),), 1, -1, -1))
    assert r.satisfied and not r.equality and (r.lhs, r.rhs) == (2, 0)


def test_froyshov_flags_indefinite():
    r = froyshov_check(BoundarySpec((("Y", 0),), 2, 0, 0))
    assert not r.negative_definite
    with pytest.raises(ValueError):
        BoundarySpec((), -1, 0, 0)


def test_additivity():
    assert additivity_check(0, 0, 0)
    assert additivity_check(-1, -1, -2)
    assert additivity_check(F(1, 8), F(-1, 8), 0)
    assert not additivity_check(F(1, 4), F(1, 4), F(1, 4))


def test_char_vector_diagonal():
    assert char_vector_max(DiagonalLattice(1)).value == 0
    r = char_vector_max(DiagonalLattice(8))
    assert r.value == 0 and r.exhaustive and all(abs(c) == 1 for c in r.vector)
    with pytest.raises(ValueError):
        DiagonalLattice(0)


def test_char_vector_e8():
    with pytest.warns(UserWarning, match="heuristic"):
        r = char_vector_max(negative_definite_e8())
    # E8 is even, so c = 0 is characteristic
    assert r.value == 1 and not r.exhaustive
    assert all(c == 0 for c in r.vector)


def test_char_vector_rejects_bad_forms():
    with pytest.raises(LatticeError):
        char_vector_max(np.eye(2, dtype=np.int64))
    with pytest.raises(LatticeError):
        char_vector_max(np.array([[-1, 1], [0, -1]]))


def test_char_vector_small_box_brute():
    # <-2> + <-3>: characteristic means c_i = Q_ii mod 2
    Q = np.array([[-2, 0], [0, -3]])
    with pytest.warns(UserWarning):
        r = char_vector_max(Q, bound=3)
    best = max(-2 * a * a - 3 * b * b for a in range(-3, 4) for b in range(-3, 4) if a % 2 == 0 and b % 2 == 1)
    assert r.value == F(2 + best, 8)


def test_lens_counterexamples():
    cx = lens_counterexamples(4)
    assert {(c.q, c.j) for c in cx} == {(2, 0), (3, 0), (4, 0)}
    for c in cx:
        assert c.violates_monotonicity
        # the definite-bounding inequality still holds for these cobordisms
        assert froyshov_check(c.boundary_spec()).satisfied


def test_chamber_form_check():
    r = chamber_form_check(1, [1], 0, -1)
    assert r.applies and r.rhs == F(9, 8) and r.satisfied is False
    r = chamber_form_check(0, [-1], 0, 0)
    assert not r.applies and r.satisfied is None
    r = chamber_form_check(2, [1, F(1, 2)], -4, -4)
    assert r.applies and r.rhs == F(3, 2) and r.satisfied


def test_lens_denominators():
    for q in range(2, 13):
        assert all((8 * q) % h.denominator == 0 for h in lens_h_table(q))

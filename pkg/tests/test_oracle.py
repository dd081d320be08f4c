from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floerkit import io
from floerkit.chambers import equivariant_groups
from floerkit.deltacx import cohomology, delta_towers, reduced, validate
from floerkit.exactalg import GF, QQ, ZZ, MalformedComplexError
from floerkit.oracle import (
    CWComplexData,
    EigenvalueFamily,
    MorseModel,
    OracleError,
    PLCurve,
    berger_family,
    cpn_cw,
    cw_cohomology,
    generate_random_delta,
    morse_agreement,
    morse_to_delta,
    mv_splice,
    random_family,
    spectral_flow,
)

F = Fraction


def ranks(H):
    return {k: g.rank for k, g in H.items()}


# -- cellular cohomology -------------------------------------------------------------------


def test_cw_vectors():
    assert ranks(cw_cohomology(cpn_cw(2))) == {0: 1, 1: 0, 2: 1, 3: 0, 4: 1}
    assert ranks(cw_cohomology(CWComplexData((1, 1), ()))) == {0: 1, 1: 1}
    rp2 = CWComplexData((1, 1, 1), (None, [[0]], [[2]]))
    H = cw_cohomology(rp2, ZZ)
    assert (H[0].rank, H[0].torsion) == (1, ())
    assert H[1].rank == 0 and H[1].torsion == ()
    assert (H[2].rank, H[2].torsion) == (0, (2,))
    # mod 2 both H^1 and H^2 survive
    assert ranks(cw_cohomology(rp2, GF(2))) == {0: 1, 1: 1, 2: 1}


def test_cw_rejects_bad_boundary():
    with pytest.raises(MalformedComplexError):
        CWComplexData((1, 1, 1), (None, [[1]], [[1]]))


# -- Mayer-Vietoris splice -----------------------------------------------------------------


def test_mv_vectors():
    r = mv_splice(1, {}, (0, 8))
    assert r.dims == {q: int(q >= 2 and q % 2 == 0) for q in range(9)}
    r = mv_splice(2, {}, (0, 8))
    assert r.dims == {q: int(q >= 4 and q % 2 == 0) for q in range(9)}
    r = mv_splice(1, {0: 1}, (0, 8))
    assert r.dims[0] == 1 and r.dims == {q: int(q % 2 == 0) for q in range(9)}
    assert r.ranges_ok


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mv_rank_identity(n):
    hb = {q: (q + 1) % 2 + (q == 1) for q in range(2 * n)}
    r = mv_splice(n, hb, (0, 2 * n + 4))
    for q in range(0, 2 * n + 5):
        hc = int(q % 2 == 0)
        hs = int(q % 2 == 0 and q <= 2 * n - 2)
        assert r.dims[q] == hb.get(q, 0) + hc - hs
    assert r.ranges_ok


def test_mv_errors():
    with pytest.raises(OracleError):
        mv_splice(2, {}, (0, 3))
    with pytest.raises(OracleError):
        mv_splice(1, {2: 1}, (0, 6))
    with pytest.raises(OracleError):
        mv_splice(0, {})


# -- Morse models --------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["morse_n1", "morse_n2", "morse_n2_free", "morse_n3"])
def test_morse_agreement(name):
    M = io.load(name).morse
    assert morse_agreement(M).agrees


def test_morse_single_minimum():
    M = MorseModel(2, (("a", 0),))
    C = morse_to_delta(M)
    P = cohomology(C)
    assert C.chamber == 2 and P.dim(0) == 1
    T = delta_towers(P, 3)
    assert all(QQ.is_zero(x) for x in T.delta + T.delta_prime)


def test_morse_flow_to_fixed_point():
    M = io.load("morse_n2").morse
    C = morse_to_delta(M)
    assert C.delta.tolist() == [0, 0, 1]
    # c dies in the reduced group, b and a cancel
    assert reduced(cohomology(C)).space.total == 0


def test_morse_ball_model():
    M = MorseModel(1, (), cw=CWComplexData((0,), ()))
    C = morse_to_delta(M)
    assert C.n == 0 and C.chamber == 1
    E = equivariant_groups(cohomology(C), 0, 6)
    assert {q: E.over.dim(q) for q in range(7)} == mv_splice(1, {}, (0, 6)).dims


def test_morse_errors():
    with pytest.raises(OracleError):
        morse_to_delta(MorseModel(1, (("a", 2),)))
    with pytest.raises(OracleError):
        morse_to_delta(MorseModel(2, (("a", 1),), flows_to_p={"a": 1}))
    with pytest.raises(OracleError):
        morse_agreement(MorseModel(1, ()))


# -- spectral flow -------------------------------------------------------------------------


def line(a, b, slope=1, shift=0):
    return PLCurve(((F(a), F(slope * a - shift)), (F(b), F(slope * b - shift))))


def test_spectral_flow_vectors():
    assert spectral_flow(EigenvalueFamily((line(-1, 1),))).value == 1
    assert spectral_flow(EigenvalueFamily((line(-1, 1), line(-1, 1, -1)))).value == 0
    for N in range(1, 6):
        sf = spectral_flow(berger_family(N))
        assert sf.value == N and (sf.up, sf.down) == (N, 0)


def test_spectral_flow_multiplicity_and_vertex_zero():
    c = PLCurve(((F(0), F(-1)), (F(1, 2), F(0)), (F(1), F(1))), multiplicity=3)
    assert spectral_flow(EigenvalueFamily((c,))).value == 3


def test_spectral_flow_rejects_nongeneric():
    with pytest.raises(OracleError):
        spectral_flow(EigenvalueFamily((line(0, 1),)))
    tangent = PLCurve(((F(-1), F(1)), (F(0), F(0)), (F(1), F(1))))
    with pytest.raises(OracleError, match="tangential"):
        spectral_flow(EigenvalueFamily((tangent,)))
    flat = PLCurve(((F(-1), F(-1)), (F(0), F(0)), (F(1, 2), F(0)), (F(1), F(1))))
    with pytest.raises(OracleError, match="segment"):
        spectral_flow(EigenvalueFamily((flat,)))


def test_barrier_must_avoid_curves():
    E = EigenvalueFamily((line(-1, 1),))
    with pytest.raises(OracleError):
        spectral_flow(E, PLCurve(((F(-1), F(1, 2)), (F(1), F(1, 2)))))


def test_spectral_flow_additive():
    for seed in range(30):
        E, H, split = random_family(seed)
        if split is None:
            continue
        a, b = E.interval
        whole = spectral_flow(E, H).value
        left = spectral_flow(E.restrict(a, split)).value
        right = spectral_flow(E.restrict(split, b)).value
        assert whole == left + right


# -- generator -----------------------------------------------------------------------------


def test_generator_basic():
    assert generate_random_delta(7, size=0).n == 0
    a = io.dumps(io.Instance("r", generate_random_delta(42, size=16)))
    b = io.dumps(io.Instance("r", generate_random_delta(42, size=16)))
    assert a == b


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([QQ, GF(2), GF(3), ZZ]))
def test_generator_valid(seed, K):
    C = generate_random_delta(seed, size=14, coeff=K)
    assert validate(C).ok

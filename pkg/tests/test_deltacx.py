from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floerkit import io
from floerkit.deltacx import (
    DeltaComplex,
    InconsistencyError,
    ValidationError,
    cohomology,
    delta_towers,
    dualize,
    euler_characteristic,
    euler_characteristics,
    make_complex,
    reduced,
    reduced_euler_characteristic,
    validate,
    zeta,
)
from floerkit.exactalg import GF, QQ, ZZ
from floerkit.oracle import generate_random_delta

from helpers import FIELDS


def s3_1():
    return make_complex(1, [("a", 0)], delta={"a": 1})


# -- validation ------------------------------------------------------------------------------


def test_validate_trivial():
    assert validate(DeltaComplex.empty(0)).ok
    assert validate(make_complex(2, [("a", 4)])).ok


def test_validate_catches_relation():
    # delta' delta(a) = b but v(a) = s with d s = 0
    C = make_complex(0, [("a", -2), ("s", 0), ("b", 1)], v={("s", "a"): 1}, delta={"a": 1}, delta_prime={"b": 1})
    rep = validate(C)
    assert not rep.ok
    assert [c.name for c in rep.failed()] == ["dv−vd+δ′δ=0"]
    with pytest.raises(ValidationError):
        rep.raise_if_failed()
    with pytest.raises(ValidationError):
        cohomology(C)


def test_validate_repaired_relation():
    C = make_complex(
        0, [("a", -2), ("s", 0), ("b", 1)], d={("b", "s"): -1}, v={("s", "a"): 1}, delta={"a": 1}, delta_prime={"b": 1}
    )
    assert validate(C).ok


def test_validate_grading():
    C = make_complex(0, [("a", 0), ("b", 2)], d={("b", "a"): 1})
    rep = validate(C)
    assert not rep.ok and rep.failed()[0].name == "grading"


def test_validate_dd():
    C = make_complex(0, [("a", 0), ("b", 1), ("c", 2)], d={("b", "a"): 1, ("c", "b"): 1})
    assert "d∘d=0" in [c.name for c in validate(C).failed()]


# -- cohomology ------------------------------------------------------------------------------


def test_cohomology_integral_torsion():
    C = make_complex(0, [("a", 0), ("b", 1)], d={("b", "a"): 2}, coeff=ZZ)
    P = cohomology(C, ZZ)
    assert P.summary(0).is_zero
    assert P.summary(1).torsion == (2,)
    assert cohomology(C, GF(2)).dim(0) == 1
    assert cohomology(C, QQ).dim(1) == 0


def test_s3_models():
    P = cohomology(DeltaComplex.empty(0))
    assert all(P.dim(q) == 0 for q in range(-5, 6))
    P = cohomology(s3_1())
    assert P.dim(0) == 1 and not QQ.is_zero(P.delta0)
    assert P.parity(0) == 0


def test_towers():
    T = delta_towers(cohomology(s3_1()), 3)
    assert not QQ.is_zero(T.delta[0])
    assert all(QQ.is_zero(x) for x in T.delta[1:])
    assert all(QQ.is_zero(x) for x in T.delta_prime)
    T = delta_towers(cohomology(dualize(s3_1())), 3)
    assert not QQ.is_zero(T.delta_prime[0])
    assert all(QQ.is_zero(x) for x in T.delta_prime[1:])
    C = make_complex(0, [("a", 0), ("b", 2)], v={("b", "a"): 5})
    T = delta_towers(cohomology(C), 2)
    assert all(QQ.is_zero(x) for x in T.delta + T.delta_prime)


def test_reduced_groups():
    assert reduced(cohomology(s3_1())).space.total == 0
    C = make_complex(0, [("a", 0), ("b", 2), ("c", 3)], v={("b", "a"): 1})
    R = reduced(cohomology(C))
    assert R.space.total == 3
    assert reduced(cohomology(io.load("poincare").complex)).space.total == 0


def test_zeta_and_h():
    for m in (-2, 0, Fraction(3, 4)):
        P = cohomology(DeltaComplex.empty(m))
        assert zeta(P) == 0
    P = cohomology(s3_1())
    assert zeta(P) == 1 and P.chamber - zeta(P) == 0
    D = cohomology(dualize(s3_1()))
    assert D.chamber == -1 and zeta(D) == -1 and D.chamber - zeta(D) == 0


def test_zeta_inconsistent_towers():
    C = make_complex(0, [("a", -2), ("s", 0), ("b", 1)], v={("s", "a"): 1}, delta={"a": 1}, delta_prime={"b": 1})
    P = cohomology(C, check=False)
    with pytest.raises(InconsistencyError):
        zeta(P)


def test_dualize():
    D = dualize(DeltaComplex.empty(3))
    assert D.n == 0 and D.chamber == -3
    D = dualize(s3_1())
    assert D.chamber == -1 and D.degrees == (-1,) and D.delta_prime.tolist() == [1]
    C = generate_random_delta(5, size=12)
    assert io.same_complex(dualize(dualize(C)), C)


def test_euler():
    e = euler_characteristics(cohomology(DeltaComplex.empty(2)))
    assert e.chi == 0 and e.lambda_tilde == -2
    e = euler_characteristics(cohomology(s3_1()))
    assert e.chi == 1 and e.lambda_tilde == 0
    with pytest.raises(InconsistencyError):
        euler_characteristics(cohomology(s3_1()), casson=1)


def test_fractional_chamber_parity():
    # degrees in 1/4 + Z; ind2 measured from 2m - 2
    C = make_complex(Fraction(1, 8), [("x", Fraction(1, 4))])
    P = cohomology(C)
    assert P.dim(Fraction(1, 4)) == 1 and P.parity(Fraction(1, 4)) == 0


# -- properties ------------------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(range(3)), st.integers(0, 20))
def test_random_instances_valid(seed, fi, size):
    K = FIELDS[fi]
    C = generate_random_delta(seed, size=size, coeff=K)
    assert C.n <= size
    assert validate(C).ok
    P = cohomology(C, K)
    z = zeta(P, crosscheck=False)
    assert z == euler_characteristic(P) - reduced_euler_characteristic(reduced(P))


def test_generator_determinism():
    a = io.dumps(io.Instance("g", generate_random_delta(42, size=18)))
    b = io.dumps(io.Instance("g", generate_random_delta(42, size=18)))
    assert a == b
    assert generate_random_delta(3, size=0).n == 0


@pytest.mark.parametrize("p", [2, 3, 5])
def test_universal_coefficients(p):
    # dim H^q(F_p) = rank H^q(Z) + #(p | torsion of H^q) + #(p | torsion of H^{q+1})
    for seed in range(25):
        C = generate_random_delta(seed, size=12, coeff=ZZ, torsion=p, fractional=False)
        PZ, Pp = cohomology(C, ZZ), cohomology(C, GF(p))
        for q in C.degree_set():
            hz = PZ.summary(q)
            nxt = PZ.summary(q + 1)
            want = hz.rank + sum(t % p == 0 for t in hz.torsion)
            want += 0 if nxt is None else sum(t % p == 0 for t in nxt.torsion)
            assert Pp.dim(q) == want, (seed, q)

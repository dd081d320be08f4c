"""Cobordism maps between delta-complexes and trace computations.

A cobordism is chain-level data (W#, delta_W, delta'_W, phi) together with
the topological numbers that decide which relations have to hold.  Induced
maps on the equivariant groups are computed through the chamber families of
the two ends: HF-bar in degree q is read off a chamber m with q <= 2m - 1 and
HF-under in degree q off a chamber m with 2m <= q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from floerkit.chambers import (
    ChamberFamily,
    _D_row,
    _Dprime_col,
    _family,
    _is_even_class,
    equivariant_groups,
    lower_chamber,
    raise_chamber,
)
from floerkit.deltacx import (
    CohomologyPackage,
    DeltaComplex,
    _tower_length,
    cohomology,
    delta_towers,
    induced_map,
    reduced,
)
from floerkit.exactalg import QQ, ZZ, Coefficients, fmt, frac, rank, solve


class UnsupportedCase(ValueError):
    """The requested map is not determined by the data (e.g. P(W) with b+ = 0, b1 > 0)."""


class CobordismError(ValueError):
    pass


@dataclass(frozen=True)
class Topology:
    b1: int = 0
    bplus: int = 0
    b2: int = 0
    sigma: int = 0
    c1sq: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "c1sq", frac(self.c1sq))

    @property
    def d(self) -> Fraction:
        return (self.c1sq - self.sigma) / 4 + self.b1 - self.bplus

    def __add__(self, other: "Topology") -> "Topology":
        return Topology(
            self.b1 + other.b1, self.bplus + other.bplus, self.b2 + other.b2, self.sigma + other.sigma, self.c1sq + other.c1sq
        )

    def to_json(self):
        return {"b1": self.b1, "bplus": self.bplus, "b2": self.b2, "sigma": self.sigma, "c1sq": fmt(self.c1sq)}


def _zeros(r, c):
    return ZZ.zeros(r, c)


@dataclass(frozen=True, eq=False)
class CobordismData:
    """W#: CF^*(source) -> CF^{*-d}(target) and its companions.

    ``Wsharp`` is (n_target x n_source); ``deltaW`` a row on the source,
    ``deltaW_prime`` a column on the target, ``phi`` (n_target x n_source).
    """

    source: DeltaComplex
    target: DeltaComplex
    Wsharp: np.ndarray
    topology: Topology = field(default_factory=Topology)
    deltaW: np.ndarray | None = None
    deltaW_prime: np.ndarray | None = None
    phi: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        s, t = self.source.n, self.target.n
        W = np.asarray(self.Wsharp, dtype=object).reshape(t, s) if s and t else _zeros(t, s)
        object.__setattr__(self, "Wsharp", ZZ.asarray(W))
        dw = ZZ.zeros(s) if self.deltaW is None else ZZ.asarray(np.asarray(self.deltaW, dtype=object).reshape(s))
        dwp = ZZ.zeros(t) if self.deltaW_prime is None else ZZ.asarray(np.asarray(self.deltaW_prime, dtype=object).reshape(t))
        ph = _zeros(t, s) if self.phi is None else ZZ.asarray(np.asarray(self.phi, dtype=object).reshape(t, s))
        object.__setattr__(self, "deltaW", dw)
        object.__setattr__(self, "deltaW_prime", dwp)
        object.__setattr__(self, "phi", ph)

    @property
    def m1(self) -> Fraction:
        return self.source.chamber

    @property
    def m2(self) -> Fraction:
        return self.target.chamber

    @property
    def d(self) -> Fraction:
        return self.topology.d

    @property
    def k(self) -> Fraction:
        return self.m2 - self.m1 + self.d / 2

    @property
    def coeff(self) -> Coefficients:
        K = self.source.coeff
        return K if K.is_field else QQ

    @cached_property
    def P1(self) -> CohomologyPackage:
        return cohomology(self.source, self.coeff)

    @cached_property
    def P2(self) -> CohomologyPackage:
        if self.target is self.source:
            return self.P1
        return cohomology(self.target, self.coeff)

    def on_cohomology(self, q) -> np.ndarray:
        """W^*: HF^q(source) -> HF^{q-d}(target)."""
        q = frac(q)
        return induced_map(self.source, self.P1.groups, self.target, self.P2.groups, self.Wsharp, q, q - self.d, self.coeff)


# -- validation -----------------------------------------------------------------------


@dataclass(frozen=True)
class CobordismCheck:
    name: str
    ok: bool | None
    detail: str = ""

    def to_json(self):
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


@dataclass(frozen=True)
class CobordismReport:
    checks: tuple[CobordismCheck, ...]
    homotopy_sign: str | None
    d: Fraction
    k: Fraction

    @property
    def ok(self) -> bool:
        return all(c.ok is not False for c in self.checks)

    def failed(self):
        return [c for c in self.checks if c.ok is False]

    def check(self, name) -> CobordismCheck:
        return next(c for c in self.checks if c.name == name)

    def to_json(self):
        return {
            "ok": self.ok,
            "d": fmt(self.d),
            "k": fmt(self.k),
            "homotopy_sign": self.homotopy_sign,
            "checks": [c.to_json() for c in self.checks],
        }


def _shift_ok(M, rows_deg, cols_deg, shift, K) -> bool:
    """Nonzero entries of M only from degree q to degree q + shift."""
    for (i, j), x in np.ndenumerate(M):
        if not K.is_zero(K.scalar(x)) and rows_deg[i] != cols_deg[j] + shift:
            return False
    return True


def _chain_coeff(W: CobordismData) -> Coefficients:
    K = W.source.coeff
    return K if K.kind == "Fp" else ZZ


def validate_cobordism(W: CobordismData) -> CobordismReport:
    """Chain-map property, the homotopy relation and the delta-tower dichotomy."""
    S, T = W.source, W.target
    K = _chain_coeff(W)
    d, k = W.d, W.k
    checks = []
    degs_s, degs_t = S.degrees, T.degrees
    grading = _shift_ok(W.Wsharp, degs_t, degs_s, -d, K) and _shift_ok(W.phi, degs_t, degs_s, -d + 1, K)
    dw_ok = all(K.is_zero(K.scalar(x)) or degs_s[j] == 2 * W.m2 - 1 + d for j, x in enumerate(W.deltaW))
    dwp_ok = all(K.is_zero(K.scalar(x)) or degs_t[i] == 2 * W.m1 - d for i, x in enumerate(W.deltaW_prime))
    checks.append(CobordismCheck("grading", grading and dw_ok and dwp_ok))

    def mm(A, B):
        return K.matmul(K.asarray(A), K.asarray(B))

    chain = K.is_zero(K.sub(mm(T.d, W.Wsharp), mm(W.Wsharp, S.d))) if S.n and T.n else True
    checks.append(CobordismCheck("chain map", chain))

    required = W.topology.bplus > 1 or k >= 0
    sign = None
    if S.n and T.n:
        R = K.sub(mm(W.Wsharp, S.v), mm(T.v, W.Wsharp))
        R = K.add(R, K.asarray(np.outer(T.delta_prime, W.deltaW)))
        R = K.add(R, K.asarray(np.outer(W.deltaW_prime, S.delta)))
        dphi, phid = mm(T.d, W.phi), mm(W.phi, S.d)
        plus = K.is_zero(K.sub(R, K.add(dphi, phid)))
        minus = K.is_zero(K.sub(R, K.sub(dphi, phid)))
        sign = "+/-" if plus and minus else "+" if plus else "-" if minus else None
    else:
        sign = "+/-"
    hok = sign is not None
    checks.append(
        CobordismCheck("homotopy", hok if required else (True if hok else None), "required" if required else "not required")
    )
    checks.extend(_dichotomy(W))
    return CobordismReport(tuple(checks), sign, d, k)


def _dichotomy(W: CobordismData) -> list[CobordismCheck]:
    top = W.topology
    K = W.coeff
    P1, P2 = W.P1, W.P2
    k = W.k
    if top.bplus >= 1:
        branch = "bplus"
    elif top.b1 == 0 and k >= 0:
        branch = "definite"
    else:
        return [CobordismCheck("tower dichotomy", None, "no constraint (bplus = 0 and (b1 > 0 or k < 0))")]
    if branch == "definite" and k.denominator != 1:
        towers = _tower_length(P1) or _tower_length(P2)
        ok = None if not towers else False
        return [CobordismCheck("tower dichotomy", ok, f"k = {fmt(k)} is not an integer" + (" but towers are nonzero" if towers else ""))]
    k = int(k) if branch == "definite" else 0
    n = max(_tower_length(P1), _tower_length(P2)) + abs(k) + 1
    T1, T2 = delta_towers(P1, n), delta_towers(P2, n)
    bad = []
    for j in range(n + 1):
        # delta_j of the target composed with W^*
        q2 = T2.delta_degree(j)
        Wst = W.on_cohomology(q2 + W.d)
        lhs = K.matmul(T2.delta[j].reshape(1, -1), Wst).reshape(-1) if Wst.shape[0] else K.zeros(Wst.shape[1])
        if branch == "bplus" or j < k:
            rhs = K.zeros(lhs.shape[0])
        else:
            rhs = T1.delta[j - k]
        if lhs.shape != rhs.shape or not K.is_zero(K.sub(lhs, rhs)):
            bad.append(f"delta_{j} W*")
        # W^* delta'_j of the source
        q1 = T1.delta_prime_degree(j)
        Wst = W.on_cohomology(q1)
        lhs = K.matmul(Wst, T1.delta_prime[j].reshape(-1, 1)).reshape(-1) if Wst.shape[1] else K.zeros(Wst.shape[0])
        if branch == "bplus" or j < k:
            rhs = K.zeros(lhs.shape[0])
        else:
            rhs = T2.delta_prime[j - k]
        if lhs.shape != rhs.shape or not K.is_zero(K.sub(lhs, rhs)):
            bad.append(f"W* delta'_{j}")
    detail = f"branch {branch}" + (f", k = {k}" if branch == "definite" else "")
    if bad:
        detail += "; fails: " + ", ".join(bad)
    return [CobordismCheck("tower dichotomy", not bad, detail)]


# -- induced maps -----------------------------------------------------------------------


def _invert(M, K, what):
    if M.shape[0] != M.shape[1] or (M.size and rank(M, K) != M.shape[0]):
        raise CobordismError(f"{what} is not an isomorphism")
    if M.size == 0:
        return M.copy()
    return solve(M, K.eye(M.shape[0]), K)


@dataclass(frozen=True, eq=False)
class InducedMaps:
    """Degreewise matrices; keys are source degrees, maps go q -> q - d."""

    W: CobordismData
    HF: dict
    over: dict
    under: dict
    hat: dict
    poly: dict
    squares: dict
    u_commutes: bool
    window: tuple
    E1: object = field(repr=False, default=None)
    E2: object = field(repr=False, default=None)

    @property
    def ok(self) -> bool:
        return self.u_commutes and all(self.squares.values())

    def to_json(self):
        def mats(dct):
            return {fmt(q): [[fmt(x) for x in row] for row in M.tolist()] for q, M in dct.items() if M.size}

        return {
            "d": fmt(self.W.d),
            "window": [fmt(self.window[0]), fmt(self.window[1])],
            "HF": mats(self.HF),
            "over": mats(self.over),
            "under": mats(self.under),
            "hat": mats(self.hat),
            "poly": {fmt(q): fmt(x) for q, x in self.poly.items()},
            "squares": self.squares,
            "u_commutes": self.u_commutes,
        }


def _degrees(offset, lo, hi):
    lo, hi = frac(lo), frac(hi)
    q = offset + (int((lo - offset).__floor__()))
    while q < lo:
        q += 1
    out = []
    while q <= hi:
        out.append(q)
        q += 1
    return out


def induced_maps(W: CobordismData, window=(-8, 8), check: bool = True) -> InducedMaps:
    """HF, HF-bar, HF-under, reduced and polynomial maps of W on ``window``.

    HF-bar maps are available for source degrees q <= 2 m1 - 1, HF-under
    maps for q >= 2 m2 + d.  P(W) is zero when b+ > 0 and x^m -> x^(m-d/2)
    when b+ = b1 = 0; b+ = 0 < b1 raises UnsupportedCase.
    """
    top = W.topology
    if top.bplus == 0 and top.b1 > 0:
        raise UnsupportedCase("P(W) is not determined when b+ = 0 and b1 > 0")
    if check:
        rep = validate_cobordism(W)
        if not rep.ok:
            raise CobordismError("cobordism fails: " + ", ".join(c.name for c in rep.failed()))
    K = W.coeff
    d = W.d
    P1, P2 = W.P1, W.P2
    lo, hi = frac(window[0]), frac(window[1])
    E1 = equivariant_groups(P1, lo, hi)
    E2 = equivariant_groups(P2, lo - d, hi - d)
    f1, f2 = E1.family, E2.family
    T1, U1 = E1.over.chamber_ref, E1.under.chamber_ref
    T2, U2 = E2.over.chamber_ref, E2.under.chamber_ref
    m1, m2 = W.m1, W.m2
    degs = _degrees(P1.offset, lo, hi)

    HF, over, under, hat, poly = {}, {}, {}, {}, {}
    for q in degs:
        Wq = W.on_cohomology(q)
        HF[q] = Wq
        if q <= 2 * m1 - 1:
            a = _invert(f1.J(m1, T1, q), K, f"J in degree {fmt(q)}") if T1 >= m1 else f1.J(T1, m1, q)
            b = f2.J(m2, T2, q - d)
            over[q] = K.matmul(b, K.matmul(Wq, a))
        if q - d >= 2 * m2:
            a = f1.J(U1, m1, q)
            b = _invert(f2.J(U2, m2, q - d), K, f"J in degree {fmt(q - d)}")
            under[q] = K.matmul(b, K.matmul(Wq, a))
        if _is_even_class(q, m1):
            poly[q] = Fraction(0) if top.bplus > 0 else Fraction(1)

    # reduced groups
    R1, R2 = E1.reduced, E2.reduced
    for q in degs:
        if R1.dim(q) == 0:
            hat[q] = K.zeros(R2.dim(q - d), 0)
            continue
        img = K.matmul(HF[q], R1.reps[q]) if HF[q].size else K.zeros(P2.dim(q - d), R1.dim(q))
        hat[q] = K.zeros(0, R1.dim(q)) if R2.dim(q - d) == 0 else R2.coords(q - d, img)

    squares = {}
    ucomm = True
    for q in degs:
        # J square
        if q in over and q in under:
            l = K.matmul(f2.J(U2, T2, q - d), under[q])
            r = K.matmul(over[q], f1.J(U1, T1, q))
            squares[f"J@{fmt(q)}"] = bool(K.is_zero(K.sub(l, r))) if l.size else True
        # D square: D2 psi-bar = P(W) D1
        if q in over and _is_even_class(q, m1) and _is_even_class(q - d, m2):
            D1 = _D_row(f1, q, T1, K)
            D2 = _D_row(f2, q - d, T2, K)
            l = K.matmul(D2, over[q]) if over[q].size else K.zeros(1, over[q].shape[1])
            r = K.matmul(K.asarray([[poly[q]]]), D1)
            squares[f"D@{fmt(q)}"] = bool(K.is_zero(K.sub(l, r)))
        # D' square: psi-under D'1 = D'2 P(W)
        if q + 1 in under and _is_even_class(q, m1) and _is_even_class(q - d, m2) and q + 1 <= E1.window.B and q + 1 - d <= E2.window.B:
            D1 = _Dprime_col(f1, q, U1, K)
            D2 = _Dprime_col(f2, q - d, U2, K)
            l = K.matmul(under[q + 1], D1) if under[q + 1].size else K.zeros(under[q + 1].shape[0], 1)
            r = K.matmul(D2, K.asarray([[poly[q]]]))
            squares[f"D'@{fmt(q)}"] = bool(K.is_zero(K.sub(l, r)))
        # u on the reduced groups
        if q + 2 in hat and hat[q].size and hat[q + 2].shape[0]:
            l = K.matmul(hat[q + 2], R1.u(q))
            r = K.matmul(R2.u(q - d), hat[q])
            if not K.is_zero(K.sub(l, r)):
                ucomm = False
    return InducedMaps(W, HF, over, under, hat, poly, squares, ucomm, (lo, hi), E1, E2)


def factors_through_J(maps: InducedMaps) -> dict:
    """Per degree: does psi-under vanish on ker J of the source?"""
    K = maps.W.coeff
    E1 = maps.E1
    f1 = E1.family
    out = {}
    for q, M in maps.under.items():
        Jq = f1.J(E1.under.chamber_ref, E1.over.chamber_ref, q)
        if M.shape[1] == 0:
            out[q] = True
            continue
        stacked = np.concatenate([Jq, M], axis=0) if Jq.shape[0] else M
        rj = rank(Jq, K) if Jq.size else 0
        out[q] = (rank(stacked, K) if stacked.size else 0) == rj
    return out


# -- constructions -----------------------------------------------------------------------


def _same_complex(A: DeltaComplex, B: DeltaComplex) -> bool:
    if A is B:
        return True
    if A.chamber != B.chamber or A.labels != B.labels or A.degrees != B.degrees:
        return False
    return all(np.array_equal(x, y) for x, y in ((A.d, B.d), (A.v, B.v), (A.delta, B.delta), (A.delta_prime, B.delta_prime)))


def identity_cobordism(C: DeltaComplex) -> CobordismData:
    """[0,1] x Y."""
    return CobordismData(C, C, ZZ.eye(C.n), Topology(), name="identity")


def raise_cylinder(C: DeltaComplex) -> CobordismData:
    """Chamber m -> m+1 (a blow-up-type cobordism: b+ = b1 = 0, d = 0, k = 1)."""
    C2, incl = raise_chamber(C)
    rho = ZZ.zeros(C2.n)
    rho[C.n] = 1
    return CobordismData(C, C2, incl, Topology(0, 0, 1, -1, -1), deltaW_prime=rho, name="raise")


def lower_cylinder(C: DeltaComplex) -> CobordismData:
    """Chamber m-1 -> m, from the lowered model onto C."""
    C1, proj = lower_chamber(C)
    lam = ZZ.zeros(C1.n)
    lam[C.n] = -1
    return CobordismData(C1, C, proj, Topology(0, 0, 1, -1, -1), deltaW=lam, name="lower")


def chamber_cobordism(fam: ChamberFamily, m1, m2) -> CobordismData:
    """Composite of raise cylinders model(m1) -> model(m2) inside one family."""
    m1, m2 = frac(m1), frac(m2)
    if m2 < m1:
        raise CobordismError("chamber cobordisms go upwards")
    base = fam.m
    if m1 < base < m2:
        # crossing the base: the cross terms are d(phi) + phi d with
        # phi = rho_base lambda_base^*
        W = compose(chamber_cobordism(fam, m1, base), chamber_cobordism(fam, base, m2))
        A, B = W.source, W.target
        lam = next(j for j, lab in enumerate(A.labels) if lab == fam.model(base - 1).labels[-1])
        rho = next(i for i, lab in enumerate(B.labels) if lab == fam.model(base + 1).labels[-1])
        phi = W.phi.copy()
        phi[rho, lam] += 1
        return CobordismData(A, B, W.Wsharp, W.topology, W.deltaW, W.deltaW_prime, phi, W.name)
    W = identity_cobordism(fam.model(m1))
    cur = m1
    while cur < m2:
        A, B = fam.model(cur), fam.model(cur + 1)
        step = ZZ.asarray(fam.chain_map(cur, cur + 1))
        a_labels, b_labels = set(A.labels), set(B.labels)
        dw, dwp = ZZ.zeros(A.n), ZZ.zeros(B.n)
        # above the base a generator rho is adjoined, below it lambda is dropped
        for i, lab in enumerate(B.labels):
            if lab not in a_labels:
                dwp[i] = 1
        for j, lab in enumerate(A.labels):
            if lab not in b_labels:
                dw[j] = -1
        step_W = CobordismData(A, B, step, Topology(0, 0, 1, -1, -1), deltaW=dw, deltaW_prime=dwp, name="cyl")
        W = compose(W, step_W)
        cur += 1
    return W


def compose(W1: CobordismData, W2: CobordismData) -> CobordismData:
    """W2 after W1 (target of W1 = source of W2).

    delta_W = delta_W2 W1 + c delta_W1 where W2 delta'_mid = c delta'_tgt,
    delta'_W = W2 delta'_W1 + c' delta'_W2 where delta_mid W1 = c' delta_src,
    phi = W2 phi1 + phi2 W1.  When the middle towers are not carried along
    by a scalar the cross terms are dropped and validate_cobordism decides.
    """
    if not _same_complex(W1.target, W2.source):
        raise CobordismError("cobordisms are not composable")
    K = ZZ if W1.source.coeff.kind != "Fp" else W1.source.coeff
    Ws = K.matmul(W2.Wsharp, W1.Wsharp)
    dW = K.add(K.matmul(W2.deltaW.reshape(1, -1), W1.Wsharp).reshape(-1), _extra_delta(W1, W2, K))
    dWp = K.add(K.matmul(W2.Wsharp, W1.deltaW_prime.reshape(-1, 1)).reshape(-1), _extra_delta_prime(W1, W2, K))
    phi = K.add(K.matmul(W2.Wsharp, W1.phi), K.matmul(W2.phi, W1.Wsharp))
    name = f"{W2.name or 'W2'}*{W1.name or 'W1'}"
    return CobordismData(W1.source, W2.target, Ws, W1.topology + W2.topology, dW, dWp, phi, name)


def _extra_delta(W1, W2, K):
    """Part of delta_W coming from W2 delta'_mid delta_W1, when W2 delta'_mid = delta'_tgt."""
    mid, tgt = W1.target, W2.target
    x = K.matmul(W2.Wsharp, mid.delta_prime.reshape(-1, 1)).reshape(-1)
    if K.is_zero(x) or K.is_zero(W1.deltaW):
        return K.zeros(W1.source.n)
    c = _scalar_multiple(x, tgt.delta_prime, K)
    if c is None:
        return K.zeros(W1.source.n)
    return K.asarray([c * y for y in W1.deltaW])


def _extra_delta_prime(W1, W2, K):
    mid, src = W1.target, W1.source
    x = K.matmul(mid.delta.reshape(1, -1), W1.Wsharp).reshape(-1)
    if K.is_zero(x) or K.is_zero(W2.deltaW_prime):
        return K.zeros(W2.target.n)
    c = _scalar_multiple(x, src.delta, K)
    if c is None:
        return K.zeros(W2.target.n)
    return K.asarray([c * y for y in W2.deltaW_prime])


def _scalar_multiple(x, y, K):
    """c with x = c y, if one exists."""
    nz = [i for i in range(len(y)) if not K.is_zero(K.scalar(y[i]))]
    if not nz:
        return None
    i = nz[0]
    if K.kind == "Z":
        if x[i] % y[i]:
            return None
        c = x[i] // y[i]
    else:
        c = K.scalar(x[i]) * K.inv(K.scalar(y[i]))
    return c if K.is_zero(K.sub(K.asarray(x), K.asarray([c * t for t in y]))) else None


def summand_projection(C: DeltaComplex, idx, power: int = 0, scale: int = 1, bplus: int = 1) -> CobordismData:
    """Self-cobordism W# = scale * e_R v^power for a v-invariant summand R.

    R (generators ``idx``) must be a direct summand carrying no part of delta
    or delta'; then W# is a chain map, the homotopy relation holds with
    phi = 0 and every delta-tower composite vanishes, as for b+ >= 1.
    """
    n = C.n
    idx = list(idx)
    E = ZZ.zeros(n, n)
    for i in idx:
        E[i, i] = scale
    M = E
    for _ in range(power):
        M = ZZ.matmul(M, C.v)
    d = -2 * power
    # choose c1^2 so that d = (c1^2 - sigma)/4 + b1 - b+ with b1 = 0, sigma = b+
    c1sq = bplus + 4 * (d + bplus)
    return CobordismData(C, C, M, Topology(0, bplus, bplus, bplus, c1sq), name=f"summand^{power}")


def direct_sum(A: DeltaComplex, R: DeltaComplex) -> tuple[DeltaComplex, list[int]]:
    """A + R where R contributes no delta or delta'; returns the R indices."""
    if A.chamber != R.chamber:
        raise CobordismError("summands must share the chamber")
    if not (ZZ.is_zero(R.delta) and ZZ.is_zero(R.delta_prime)):
        raise CobordismError("the second summand must have delta = delta' = 0")
    n, r = A.n, R.n

    def blk(X, Y):
        M = ZZ.zeros(n + r, n + r)
        M[:n, :n] = X
        M[n:, n:] = Y
        return M

    def cat(x, y):
        return np.concatenate([ZZ.asarray(x), ZZ.zeros(r) if y is None else ZZ.asarray(y)])

    labels = tuple(f"a.{l}" for l in A.labels) + tuple(f"r.{l}" for l in R.labels)
    C = DeltaComplex(A.chamber, labels, A.degrees + R.degrees, blk(A.d, R.d), blk(A.v, R.v), cat(A.delta, None), cat(A.delta_prime, None), A.coeff)
    return C, list(range(n, n + r))


def random_composable_pair(seed: int, size: int = 10, coeff: Coefficients = QQ) -> tuple[CobordismData, CobordismData]:
    """Two composable cobordisms drawn from cylinders and summand projections."""
    from floerkit.oracle import generate_random_delta

    rng = np.random.default_rng(seed)
    A = generate_random_delta(int(rng.integers(1 << 30)), size=size, coeff=coeff, fractional=False)
    R0 = generate_random_delta(int(rng.integers(1 << 30)), size=max(2, size // 2), coeff=coeff, fractional=False, mode="none")
    shift = A.chamber - R0.chamber
    R = DeltaComplex(A.chamber, R0.labels, tuple(q + 2 * shift for q in R0.degrees), R0.d, R0.v, R0.delta, R0.delta_prime, coeff)
    C, idx = direct_sum(A, R)
    fam = ChamberFamily(C)

    def pick(src_m):
        kind = rng.integers(3)
        if kind == 0:
            up = int(rng.integers(0, 3))
            return chamber_cobordism(fam, src_m, src_m + up), src_m + up
        if kind == 1:
            Cm = fam.model(src_m)
            # R keeps its labels in every model of the family
            ridx = [i for i, lab in enumerate(Cm.labels) if lab.startswith("r.")]
            return summand_projection(Cm, ridx, power=0, scale=int(rng.choice([1, -1, 2]))), src_m
        return identity_cobordism(fam.model(src_m)), src_m

    m0 = C.chamber + int(rng.integers(-1, 2))
    W1, m1 = pick(m0)
    W2, _ = pick(m1)
    return W1, W2


# -- traces ---------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Mod2GradedEndo:
    even_block: np.ndarray
    odd_block: np.ndarray
    coeff: Coefficients = QQ

    def __post_init__(self):
        K = self.coeff
        e = K.asarray(self.even_block) if np.size(self.even_block) else K.zeros(0, 0)
        o = K.asarray(self.odd_block) if np.size(self.odd_block) else K.zeros(0, 0)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or o.ndim != 2 or o.shape[0] != o.shape[1]:
            raise ValueError("blocks must be square")
        object.__setattr__(self, "even_block", e)
        object.__setattr__(self, "odd_block", o)

    def __matmul__(self, other: "Mod2GradedEndo") -> "Mod2GradedEndo":
        K = self.coeff
        return Mod2GradedEndo(K.matmul(self.even_block, other.even_block), K.matmul(self.odd_block, other.odd_block), K)

    def power(self, n: int) -> "Mod2GradedEndo":
        K = self.coeff
        return Mod2GradedEndo(_mat_power(self.even_block, n, K), _mat_power(self.odd_block, n, K), K)


def _mat_power(A, n, K):
    out = K.eye(A.shape[0])
    for _ in range(n):
        out = K.matmul(out, A)
    return out


def _trace(A, K):
    t = K.scalar(0)
    for i in range(A.shape[0]):
        t = K.add(t, A[i, i])
    return t


def lefschetz(f: Mod2GradedEndo):
    K = f.coeff
    return K.to_python(K.sub(_trace(f.even_block, K), _trace(f.odd_block, K)))


def graded_endo(blocks: dict, parity_of, coeff: Coefficients) -> Mod2GradedEndo:
    """Assemble a degree-preserving endo from per-degree square blocks."""
    K = coeff
    ev = [B for q, B in blocks.items() if parity_of(q) == 0]
    od = [B for q, B in blocks.items() if parity_of(q) == 1]
    return Mod2GradedEndo(_block_diag(ev, K), _block_diag(od, K), K)


def _block_diag(blocks, K):
    n = sum(B.shape[0] for B in blocks)
    M = K.zeros(n, n)
    i = 0
    for B in blocks:
        r = B.shape[0]
        M[i : i + r, i : i + r] = B
        i += r
    return M


def chain_lefschetz(C: DeltaComplex, F: np.ndarray, coeff: Coefficients = QQ):
    """Alternating trace of a degree-0 chain endomorphism on CF."""
    K = coeff
    blocks = {q: K.asarray(F[np.ix_(C.index(q), C.index(q))]) for q in C.degree_set()}
    return lefschetz(graded_endo(blocks, C.ind2, K))


def cohomology_lefschetz(P: CohomologyPackage, F: np.ndarray):
    K = P.coeff
    C = P.complex
    blocks = {q: induced_map(C, P.groups, C, P.groups, F, q, q, K) for q in C.degree_set()}
    return lefschetz(graded_endo(blocks, C.ind2, K))


def hat_endo(maps: InducedMaps, n: int = 0) -> Mod2GradedEndo:
    """u^n psi-hat(W) on the reduced group of a self-cobordism, as a mod-2 endo."""
    W = maps.W
    K = W.coeff
    R = maps.E1.reduced
    shift = 2 * n - W.d
    P = W.P1
    blocks_e, blocks_o = [], []
    qs = sorted(R.degrees())
    total = {q: R.dim(q) for q in qs}
    # block matrix on the direct sum of reduced degrees; only diagonal blocks
    # matter for the trace, and those vanish unless the total shift is 0
    for q in qs:
        if shift != 0:
            M = K.zeros(total[q], total[q])
        else:
            M = maps.hat.get(q)
            if M is None or M.shape != (total[q], total[q]):
                raise CobordismError(f"reduced map missing in degree {fmt(q)}; widen the window")
            M = M.copy()
            # apply u^n (source degree q - d up to q)
            x = M
            cur = q - W.d
            for _ in range(n):
                x = K.matmul(R.u(cur), x)
                cur += 2
            M = x
        (blocks_e if P.parity(q) == 0 else blocks_o).append(M)
    return Mod2GradedEndo(_block_diag(blocks_e, K), _block_diag(blocks_o, K), K)


def sw_trace(W: CobordismData, n: int = 0, window=None):
    """L(u^n psi-hat(W)) for a self-cobordism W."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if W.source.offset != W.target.offset:
        raise CobordismError("mismatched ends")
    if window is None:
        R = reduced(W.P1)
        qs = R.degrees() or [W.m1]
        window = (min(qs) - 2 * n - 2, max(qs) + 2 * n + 2)
    maps = induced_maps(W, window)
    return lefschetz(hat_endo(maps, n))


# -- pairing -------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PairingData:
    """Kronecker pairing HF^q(Y, m) x HF^{-1-q}(-Y, -m) for a chamber m with q <= 2m - 1.

    In that range the first factor is HF-bar^q(Y) and the second is
    HF-under^{-1-q}(-Y), so this realises the pairing between the two limits.
    """

    P: CohomologyPackage
    Pdual: CohomologyPackage
    q: Fraction
    gram: np.ndarray

    @property
    def perfect(self) -> bool:
        K = self.P.coeff
        g = self.gram
        return g.shape[0] == g.shape[1] and (g.size == 0 or rank(g, K) == g.shape[0])

    def pair(self, x, y):
        K = self.P.coeff
        return K.to_python(K.matmul(K.matmul(K.asarray(y).reshape(1, -1), self.gram), K.asarray(x).reshape(-1, 1))[0, 0])


def pairing_at(P: CohomologyPackage, q) -> PairingData:
    from floerkit.deltacx import dualize

    q = frac(q)
    K = P.coeff
    if q > 2 * P.chamber - 1:
        fam = _family(P)
        m = P.chamber + int(((q + 1 - 2 * P.chamber) / 2).__ceil__())
        P = fam.package(m)
    Cd = dualize(P.complex)
    Pd = cohomology(Cd, K, check=False)
    g, gd = P.group(q), Pd.group(-1 - q)
    a = 0 if g is None else g.dim
    b = 0 if gd is None else gd.dim
    if a == 0 or b == 0:
        return PairingData(P, Pd, q, K.zeros(b, a))
    # cochains of the dual complex are functionals on CF^q in the same basis
    G = K.matmul(gd.reps.T, g.reps)
    return PairingData(P, Pd, q, G)


def sw_pairing(P: CohomologyPackage, q, x, y, n: int = 0):
    """<u^n x, y> with x in HF^q(Y, m) and y in HF^{-1-q-2n}(-Y, -m) (package bases)."""
    K = P.coeff
    q = frac(q)
    cur = K.asarray(x).reshape(-1)
    for i in range(n):
        cur = K.matmul(P.u(q + 2 * i), cur.reshape(-1, 1)).reshape(-1)
    pd = pairing_at(P, q + 2 * n)
    if pd.P is not P:
        raise CobordismError("degree outside the chamber's HF-bar range; pass a higher chamber package")
    return pd.pair(cur, y)


# -- trace-window lemma ----------------------------------------------------------------------


def _pad(A, r):
    out = np.zeros((r, r), dtype=object)
    out[...] = Fraction(0)
    A = np.asarray(A, dtype=object)
    if A.size:
        for (i, j), x in np.ndenumerate(A):
            out[i, j] = frac(x)
    return out


def charpoly(A) -> list[Fraction]:
    """Coefficients c_0 = 1, c_1, ..., c_r of det(xI - A) (Faddeev-LeVerrier)."""
    A = _pad(A, np.asarray(A).shape[0] if np.size(A) else 0)
    r = A.shape[0]
    K = QQ
    coeffs = [Fraction(1)]
    M = K.zeros(r, r)
    I = K.eye(r)
    for k in range(1, r + 1):
        M = K.add(K.matmul(A, M), K.asarray([[coeffs[-1] * x for x in row] for row in I.tolist()])) if r else M
        c = -_trace(K.matmul(A, M), K) / k
        coeffs.append(Fraction(c))
    return coeffs


def _strip_zero_roots(c: list[Fraction]) -> list[Fraction]:
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


@dataclass(frozen=True)
class TraceWindow:
    equal: bool
    m: int
    r: int
    first_difference: int | None
    charpoly_match: bool

    @property
    def consistent(self) -> bool:
        return self.equal == self.charpoly_match


def trace_window_equal(A, B, m: int) -> TraceWindow:
    """tr(A^n) = tr(B^n) for m <= n < 2r + m, with the char-poly cross-check."""
    if m < 1:
        raise ValueError("m must be at least 1")
    ra = np.asarray(A).shape[0] if np.size(A) else 0
    rb = np.asarray(B).shape[0] if np.size(B) else 0
    r = max(ra, rb)
    A, B = _pad(A, r), _pad(B, r)
    K = QQ
    PA, PB = _mat_power(A, m, K), _mat_power(B, m, K)
    first = None
    for n in range(m, 2 * r + m):
        if _trace(PA, K) != _trace(PB, K):
            first = n
            break
        PA, PB = K.matmul(PA, A), K.matmul(PB, B)
    match = _strip_zero_roots(charpoly(A)) == _strip_zero_roots(charpoly(B))
    return TraceWindow(first is None, m, r, first, match)


def cross_pairing_check(f: Mod2GradedEndo, g: Mod2GradedEndo, m: int) -> dict:
    """Compare f and g through f0 + g1 versus g0 + f1.

    If L(f^n) = L(g^n) for all n >= m the two block sums pass the window
    test, and then L(f) = L(g).
    """
    K = f.coeff
    X = _block_diag([f.even_block, g.odd_block], K)
    Y = _block_diag([g.even_block, f.odd_block], K)
    tw = trace_window_equal(X, Y, m)
    same_L = lefschetz(f) == lefschetz(g)
    return {"window_equal": tw.equal, "L_equal": same_L, "implication_holds": (not tw.equal) or same_L}

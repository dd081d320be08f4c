"""Moving between chambers, the equivariant groups and the fundamental sequence.

Chamber change is realised at chain level.  Raising the chamber m -> m+1
adjoins a generator rho in degree 2m with d(rho) = delta'(1); lowering
m -> m-1 adjoins lambda in degree 2m-1 and modifies d on degree 2m-2 by
-delta(.) lambda.  The natural maps between chambers are then the inclusion
(raising) and the projection killing lambda (lowering); both are chain maps
and reproduce the kernel/image description of the chamber maps exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

import numpy as np

from floerkit.deltacx import (
    CohomologyPackage,
    DeltaComplex,
    InconsistencyError,
    ReducedGroup,
    cohomology,
    delta_towers,
    reduced,
    zeta,
)
from floerkit.exactalg import (
    QQ,
    ZZ,
    Coefficients,
    GradedSpace,
    column_basis,
    fmt,
    frac,
    nullspace,
    rank,
    solve,
    span_equal,
)


class ChamberError(ValueError):
    pass


def _fresh(C: DeltaComplex, lab: str) -> str:
    # a base complex may already carry a generated label (e.g. after dualizing)
    taken = set(C.labels)
    while lab in taken:
        lab += "'"
    return lab


def raise_chamber(C: DeltaComplex, label: str | None = None) -> tuple[DeltaComplex, np.ndarray]:
    """Model of chamber m+1 and the inclusion chain map C -> C'."""
    m = C.chamber
    n = C.n
    lab = _fresh(C, label or f"rho[{fmt(m)}]")
    d = np.zeros((n + 1, n + 1), dtype=object)
    d[...] = 0
    d[:n, :n] = C.d
    d[:n, n] = C.delta_prime
    v = np.zeros((n + 1, n + 1), dtype=object)
    v[...] = 0
    v[:n, :n] = C.v
    v[n, :n] = C.delta
    delta = np.zeros(n + 1, dtype=object)
    delta[...] = 0
    delta[n] = 1
    dp = np.zeros(n + 1, dtype=object)
    dp[...] = 0
    dp[:n] = C.v.dot(C.delta_prime) if n else dp[:n]
    C2 = DeltaComplex(m + 1, C.labels + (lab,), C.degrees + (2 * m,), d, v, delta, dp, C.coeff)
    incl = np.zeros((n + 1, n), dtype=object)
    incl[...] = 0
    for i in range(n):
        incl[i, i] = 1
    return C2, incl


def lower_chamber(C: DeltaComplex, label: str | None = None) -> tuple[DeltaComplex, np.ndarray]:
    """Model of chamber m-1 and the projection chain map C' -> C."""
    m = C.chamber
    n = C.n
    lab = _fresh(C, label or f"lam[{fmt(m)}]")
    d = np.zeros((n + 1, n + 1), dtype=object)
    d[...] = 0
    d[:n, :n] = C.d
    d[n, :n] = [-x for x in C.delta]
    v = np.zeros((n + 1, n + 1), dtype=object)
    v[...] = 0
    v[:n, :n] = C.v
    v[:n, n] = C.delta_prime
    delta = np.zeros(n + 1, dtype=object)
    delta[...] = 0
    delta[:n] = C.delta.dot(C.v) if n else delta[:n]
    dp = np.zeros(n + 1, dtype=object)
    dp[...] = 0
    dp[n] = 1
    C2 = DeltaComplex(m - 1, C.labels + (lab,), C.degrees + (2 * m - 1,), d, v, delta, dp, C.coeff)
    proj = np.zeros((n, n + 1), dtype=object)
    proj[...] = 0
    for i in range(n):
        proj[i, i] = 1
    return C2, proj


def _in_class(m, target) -> Fraction:
    target = frac(target)
    if (target - m).denominator != 1:
        raise ChamberError(f"chamber {fmt(target)} is not in {fmt(m)} + Z")
    return target


class ChamberFamily:
    """Chain models of every chamber m + Z built from one base complex.

    All models share the base generators; the natural map between two models
    sends a generator to the generator with the same label (or to 0).
    """

    def __init__(self, base: DeltaComplex, coeff: Coefficients | None = None):
        self.coeff = coeff or base.coeff
        self.base = base if coeff is None else base.with_coeff(coeff)
        self._models = {self.base.chamber: self.base}
        self._packages: dict = {}

    @property
    def m(self) -> Fraction:
        return self.base.chamber

    def model(self, m) -> DeltaComplex:
        m = _in_class(self.m, m)
        if m in self._models:
            return self._models[m]
        step = 1 if m > self.m else -1
        cur = self.m
        while cur != m:
            nxt = cur + step
            if nxt not in self._models:
                C = self._models[cur]
                self._models[nxt] = raise_chamber(C)[0] if step > 0 else lower_chamber(C)[0]
            cur = nxt
        return self._models[m]

    def package(self, m) -> CohomologyPackage:
        m = _in_class(self.m, m)
        if m not in self._packages:
            self._packages[m] = cohomology(self.model(m), check=(m == self.m))
        return self._packages[m]

    def chain_map(self, m1, m2) -> np.ndarray:
        """Dense matrix of the natural chain map model(m1) -> model(m2), m1 <= m2."""
        m1, m2 = _in_class(self.m, m1), _in_class(self.m, m2)
        if m1 > m2:
            raise ChamberError("chamber maps go upwards only")
        A, B = self.model(m1), self.model(m2)
        pos = {lab: i for i, lab in enumerate(B.labels)}
        M = np.zeros((B.n, A.n), dtype=object)
        M[...] = 0
        for j, lab in enumerate(A.labels):
            if lab in pos:
                M[pos[lab], j] = 1
        return M

    def J(self, m1, m2, q) -> np.ndarray:
        """Natural map HF^q(m1) -> HF^q(m2) in the package bases."""
        m1, m2 = _in_class(self.m, m1), _in_class(self.m, m2)
        if m1 > m2:
            raise ChamberError("chamber maps go upwards only")
        K = self.coeff
        P1, P2 = self.package(m1), self.package(m2)
        q = frac(q)
        g1, g2 = P1.group(q), P2.group(q)
        d1 = 0 if g1 is None else g1.dim
        d2 = 0 if g2 is None else g2.dim
        if d1 == 0 or d2 == 0:
            return K.zeros(d2, d1)
        A, B = P1.complex, P2.complex
        pos = {A.labels[i]: k for k, i in enumerate(g1.index)}
        rows = [pos.get(B.labels[i]) for i in g2.index]
        x = K.zeros(len(g2.index), d1)
        for r, k in enumerate(rows):
            if k is not None:
                x[r] = g1.reps[k]
        return g2.coords(x)


def _family(P: CohomologyPackage) -> ChamberFamily:
    fam = getattr(P, "_family", None)
    if fam is None:
        fam = ChamberFamily(P.complex, P.coeff)
        fam._packages[P.chamber] = P
        object.__setattr__(P, "_family", fam)
    return fam


def _require_field(P: CohomologyPackage):
    if not P.is_field:
        raise TypeError("chamber change over Z is only available through torsion_transport")


def derive_chamber(P: CohomologyPackage, m_target) -> CohomologyPackage:
    """HF(Y, m_target) with its towers, from the data of one chamber."""
    _require_field(P)
    m_target = _in_class(P.chamber, m_target)
    if m_target == P.chamber:
        return P
    return _family(P).package(m_target)


# -- J maps ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class JMap:
    """The chamber map HF(m1) -> HF(m2), degree by degree.

    ``kernel[q]`` is a basis (chamber-m1 coordinates) and ``image[q]`` a basis
    (chamber-m2 coordinates).  ``predicted_*`` are the tower descriptions:
    sum of im delta'_j of chamber m1 and intersection of ker delta_j of
    chamber m2 for j < m2 - m1.
    """

    m1: Fraction
    m2: Fraction
    h: Fraction
    matrices: dict
    kernel: dict
    image: dict
    predicted_kernel: dict
    predicted_image: dict
    pattern_ok: bool

    @property
    def consistent(self) -> bool:
        return self.pattern_ok and all(self._eq(q) for q in self.matrices)

    def _eq(self, q):
        K = self._coeff
        return span_equal(self.kernel[q], self.predicted_kernel[q], K) and span_equal(
            self.image[q], self.predicted_image[q], K
        )

    _coeff: Coefficients = QQ

    def kernel_dims(self) -> dict:
        return {q: b.shape[1] for q, b in self.kernel.items() if b.shape[1]}

    def cokernel_dims(self, P2: CohomologyPackage) -> dict:
        return {q: P2.dim(q) - self.image[q].shape[1] for q in self.image if P2.dim(q) - self.image[q].shape[1]}


def thm_pattern(m1, m2, h) -> tuple[dict, dict]:
    """Kernel and cokernel dimensions of HF(m1) -> HF(m2) forced by h."""
    m1, m2, h = frac(m1), frac(m2), frac(h)
    ker, coker = {}, {}
    top = min(m2, h)
    k = 1
    while m1 + k <= top:
        ker[2 * m1 + 2 * k - 1] = 1
        k += 1
    bot = max(m1, h)
    k = 1
    while m2 - k >= bot:
        coker[2 * m2 - 2 * k] = 1
        k += 1
    return ker, coker


def J_map(P: CohomologyPackage, m1, m2) -> JMap:
    _require_field(P)
    m1, m2 = _in_class(P.chamber, m1), _in_class(P.chamber, m2)
    if m1 > m2:
        raise ChamberError("need m1 <= m2")
    K = P.coeff
    fam = _family(P)
    P1, P2 = fam.package(m1), fam.package(m2)
    ell = int(m2 - m1)
    T1 = delta_towers(P1, max(ell, 1))
    T2 = delta_towers(P2, max(ell, 1))
    degrees = sorted(set(P1.groups) | set(P2.groups))
    mats, ker, img, pk, pi = {}, {}, {}, {}, {}
    for q in degrees:
        M = fam.J(m1, m2, q)
        mats[q] = M
        d1, d2 = M.shape[1], M.shape[0]
        ker[q] = nullspace(M, K) if d2 else K.eye(d1)
        img[q] = column_basis(M, K) if d1 else K.zeros(d2, 0)
        # predicted kernel: im delta'_j (chamber m1) in degree 2 m1 + 2j + 1
        j = (q - 2 * m1 - 1) / 2
        if j.denominator == 1 and 0 <= j < ell and d1:
            pk[q] = column_basis(T1.delta_prime[int(j)].reshape(-1, 1), K)
        else:
            pk[q] = K.zeros(d1, 0)
        j = (2 * m2 - 2 - q) / 2
        if j.denominator == 1 and 0 <= j < ell and d2:
            pi[q] = nullspace(T2.delta[int(j)].reshape(1, -1), K)
        else:
            pi[q] = K.eye(d2)
    h = P.chamber - zeta(P)
    kp, cp = thm_pattern(m1, m2, h)
    kd = {q: b.shape[1] for q, b in ker.items() if b.shape[1]}
    cd = {q: P2.dim(q) - img[q].shape[1] for q in img if P2.dim(q) - img[q].shape[1]}
    pattern_ok = kd == kp and cd == cp
    return JMap(m1, m2, h, mats, ker, img, pk, pi, pattern_ok, K)


# -- tail modules ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Tower:
    """A rank-one string F -> F -> ... starting at ``base`` (the end nearest the
    core), with ``attach`` the u-map between the core and ``base``."""

    base: Fraction
    direction: str
    parity: int
    attach: np.ndarray

    def contains(self, q) -> bool:
        q = frac(q)
        diff = q - self.base if self.direction == "up" else self.base - q
        return diff >= 0 and diff.denominator == 1 and int(diff) % 2 == 0


@dataclass(frozen=True, eq=False)
class TailModule:
    """Graded module over F[u]: explicit core on [lo, hi] plus at most one
    tower above and one below.

    The core stores every degree lo, lo+1, ..., hi (including any part of a
    tower that falls inside the window).  Tower bases are hi+1 or hi+2 (up)
    and lo-1 or lo-2 (down); u is the identity along a tower.
    """

    offset: Fraction
    lo: Fraction
    hi: Fraction
    dims: dict
    u_core: dict
    towers: tuple[Tower, ...]
    coeff: Coefficients
    chamber_ref: Fraction | None = None
    meta: dict = field(default_factory=dict)

    def _tower(self, direction):
        return next((t for t in self.towers if t.direction == direction), None)

    def dim(self, q) -> int:
        q = frac(q)
        if self.lo <= q <= self.hi:
            return self.dims.get(q, 0)
        t = self._tower("up" if q > self.hi else "down")
        return 1 if t is not None and t.contains(q) else 0

    def in_core(self, q) -> bool:
        return self.lo <= frac(q) <= self.hi

    def u(self, q) -> np.ndarray:
        """u: M^q -> M^{q+2}."""
        q = frac(q)
        K = self.coeff
        a, b = self.dim(q), self.dim(q + 2)
        if self.in_core(q) and self.in_core(q + 2):
            return self.u_core.get(q, K.zeros(b, a))
        if a == 0 or b == 0:
            return K.zeros(b, a)
        up, down = self._tower("up"), self._tower("down")
        if up is not None and q + 2 == up.base:
            return up.attach
        if down is not None and q == down.base:
            return down.attach
        return K.eye(1)

    @property
    def finite_part(self) -> GradedSpace:
        return GradedSpace.from_degrees(self.offset, list(self.dims.items()))

    def tower_list(self) -> list[tuple[Fraction, str, int]]:
        return [(t.base, t.direction, t.parity) for t in self.towers]

    def degrees(self, lo=None, hi=None) -> list[Fraction]:
        lo = self.lo if lo is None else frac(lo)
        hi = self.hi if hi is None else frac(hi)
        start = self.offset + int(np.floor(float(lo - self.offset)))
        # exact stepping; the float floor only picks a starting integer
        while start < lo:
            start += 1
        while start - 1 >= lo:
            start -= 1
        out = []
        q = start
        while q <= hi:
            out.append(q)
            q += 1
        return out

    def to_json(self, lo=None, hi=None):
        return {
            "dims": {fmt(q): self.dim(q) for q in self.degrees(lo, hi) if self.dim(q)},
            "towers": [{"base": fmt(b), "direction": d, "parity": p} for b, d, p in self.tower_list()],
        }

    def describe(self, lo=None, hi=None) -> str:
        parts = [f"{fmt(q)}:{self.dim(q)}" for q in self.degrees(lo, hi) if self.dim(q)]
        tails = []
        for b, d, _ in self.tower_list():
            # start the tail where the listed window stops, not where storage does
            if d == "up" and hi is not None and frac(hi) < b:
                b = next((q for q in self.degrees(frac(hi) + 1, b) if self.dim(q)), b)
            elif d == "down" and lo is not None and frac(lo) > b:
                b = next((q for q in reversed(self.degrees(b, frac(lo) - 1)) if self.dim(q)), b)
            tails.append(f"{d}-tower from {fmt(b)}")
        return ", ".join(parts) + (" + " if parts and tails else "") + "; ".join(tails)


def _step_class(m, x, up: bool) -> Fraction:
    """Smallest (up) / largest (down) element of m + Z beyond x strictly."""
    m, x = frac(m), frac(x)
    k = (x - m)
    if up:
        t = k.numerator // k.denominator + 1
    else:
        t = -((-k.numerator) // k.denominator) - 1
    return m + t


@dataclass(frozen=True)
class Window:
    """Core degree window [A, B] shared by the three tail modules.

    A = 2L and B = 2M - 1 with L, M in m + Z.
    """

    L: Fraction
    M: Fraction

    @property
    def A(self) -> Fraction:
        return 2 * self.L

    @property
    def B(self) -> Fraction:
        return 2 * self.M - 1


def stabilization_degree(P: CohomologyPackage, h) -> Fraction:
    sup = P.complex.support()
    s = 0 if sup is None else max(abs(sup[0]), abs(sup[1]))
    return frac(s) + 2 * abs(P.chamber - frac(h)) + 4


def choose_window(P: CohomologyPackage, h, lo=None, hi=None) -> Window:
    m = P.chamber
    sup = P.complex.support()
    S = stabilization_degree(P, h)
    lows = [2 * m - 2, 2 * frac(h) - 2, -S]
    highs = [2 * m + 1, 2 * frac(h) + 1, S]
    if sup is not None:
        lows.append(sup[0] - 2)
        highs.append(sup[1] + 1)
    if lo is not None:
        lows.append(frac(lo) - 2)
    if hi is not None:
        highs.append(frac(hi) + 1)
    a = min(lows)
    b = max(highs)
    # L in m+Z with 2L <= a ; M in m+Z with 2M-1 >= b
    L = _step_class(m, a / 2, up=False)
    while 2 * (L + 1) <= a:
        L += 1
    M = _step_class(m, (b + 1) / 2, up=True)
    while 2 * (M - 1) - 1 >= b:
        M -= 1
    return Window(L, M)


@dataclass(frozen=True, eq=False)
class EquivariantGroups:
    under: TailModule
    over: TailModule
    hat: GradedSpace
    reduced: ReducedGroup
    h: Fraction
    window: Window
    family: ChamberFamily = field(repr=False)

    def __iter__(self):
        return iter((self.under, self.over, self.hat))


def _core_from_package(P: CohomologyPackage, degrees, K) -> tuple[dict, dict]:
    dims = {q: P.dim(q) for q in degrees if P.dim(q)}
    u = {}
    for q in degrees:
        if q + 2 in degrees and dims.get(q) and dims.get(q + 2):
            u[q] = P.u(q)
    return dims, u


def equivariant_groups(P: CohomologyPackage, lo=None, hi=None) -> EquivariantGroups:
    """HF-bar (direct limit), HF-under (inverse limit) and the reduced group."""
    _require_field(P)
    K = P.coeff
    h = P.chamber - zeta(P)
    W = choose_window(P, h, lo, hi)
    fam = _family(P)
    A, B = W.A, W.B
    over_src = W.M + 1
    under_src = W.L - 1
    Po = fam.package(over_src)
    Pu = fam.package(under_src)
    degs = []
    q = A
    while q <= B:
        degs.append(q)
        q += 1
    off = P.offset
    # over: tower starts at B + 1 = 2M (even class)
    dims_o, u_o = _core_from_package(Po, degs, K)
    top = B + 1
    if Po.dim(top) != 1:
        raise InconsistencyError(f"over-tower not stable at degree {fmt(top)}")
    attach_o = Po.u(top - 2) if Po.dim(top - 2) else K.zeros(1, 0)
    over = TailModule(off, A, B, dims_o, u_o, (Tower(top, "up", 0, attach_o),), K, over_src, {"source_chamber": over_src})
    dims_u, u_u = _core_from_package(Pu, degs, K)
    bot = A - 1
    if Pu.dim(bot) != 1:
        raise InconsistencyError(f"under-tower not stable at degree {fmt(bot)}")
    attach_u = Pu.u(bot) if Pu.dim(bot + 2) else K.zeros(0, 1)
    under = TailModule(off, A, B, dims_u, u_u, (Tower(bot, "down", 1, attach_u),), K, under_src, {"source_chamber": under_src})
    R = reduced(P)
    return EquivariantGroups(under, over, R.space, R, h, W, fam)


def polynomial_module(offset, m, W: Window, K: Coefficients) -> TailModule:
    """F[x, x^-1]-type module: F in degrees 2m' (m' in m + Z), u x^m' = x^(m'+1)."""
    A, B = W.A, W.B
    dims, u = {}, {}
    q = A
    while q <= B:
        if ((q - 2 * frac(m)) / 2).denominator == 1:
            dims[q] = 1
            if q + 2 <= B:
                u[q] = K.eye(1)
        q += 1
    towers = (Tower(B + 1, "up", 0, K.eye(1)), Tower(A - 2, "down", 0, K.eye(1)))
    return TailModule(frac(offset), A, B, dims, u, towers, K)


# -- fundamental sequence --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExactnessRow:
    degree: Fraction
    term: str
    ker_dim: int
    im_dim: int
    composite_zero: bool
    ok: bool


@dataclass(frozen=True, eq=False)
class FundamentalSequence:
    under: TailModule
    over: TailModule
    poly: TailModule
    J: dict
    D: dict
    Dprime: dict
    h: Fraction
    window: tuple
    exactness: tuple[ExactnessRow, ...]
    u_commutes: bool
    lowest_D_degree: Fraction | None
    hat: GradedSpace
    note: str

    @property
    def exact(self) -> bool:
        return all(r.ok for r in self.exactness)

    @property
    def ok(self) -> bool:
        return self.exact and self.u_commutes and self.lowest_D_degree == 2 * self.h


STABILIZATION_NOTE = (
    "outside the window every term is a rank-one tower on which u is invertible; "
    "J vanishes there, D is an isomorphism above and D' an isomorphism below, "
    "so exactness reduces to rank(tower) = 1 = rank(D) (resp. rank(D'))"
)


def _D_row(fam: ChamberFamily, q, over_src, K) -> np.ndarray:
    """D on HF-bar^q for q = 2m'' (row vector in the over basis)."""
    mpp = q / 2
    src = fam.package(mpp + 1)
    Jw = fam.J(mpp + 1, over_src, q)  # w: HF^q(m''+1) -> HF^q(over_src)
    d = Jw.shape[1]
    if d == 0:
        return K.zeros(1, Jw.shape[0])
    w_inv = solve(Jw, K.eye(Jw.shape[0]), K)
    if w_inv is None or rank(Jw, K) != d or Jw.shape[0] != d:
        raise InconsistencyError(f"w not invertible in degree {fmt(q)}")
    return K.matmul(src.delta0.reshape(1, -1), w_inv)


def _Dprime_col(fam: ChamberFamily, q, under_src, K) -> np.ndarray:
    """D' on P^q (q = 2m'') into HF-under^{q+1} (column vector in the under basis)."""
    mpp = q / 2
    tgt = fam.package(mpp)
    Jv = fam.J(under_src, mpp, q + 1)  # v: HF^{q+1}(under_src) -> HF^{q+1}(m'')
    d0p = tgt.delta0_prime
    if Jv.shape[1] == 0:
        return K.zeros(0, 1)
    y = solve(Jv, d0p.reshape(-1, 1), K) if Jv.shape[0] else K.zeros(Jv.shape[1], 1)
    if y is None or rank(Jv, K) != Jv.shape[1] or Jv.shape[0] != Jv.shape[1]:
        raise InconsistencyError(f"v not invertible in degree {fmt(q + 1)}")
    return y


def _is_even_class(q, m) -> bool:
    return ((frac(q) - 2 * frac(m)) / 2).denominator == 1


def fundamental_sequence(P: CohomologyPackage, window=(-12, 12)) -> FundamentalSequence:
    """J, D, D' on the tail modules, with exactness checked on ``window``."""
    _require_field(P)
    K = P.coeff
    lo, hi = frac(window[0]), frac(window[1])
    E = equivariant_groups(P, lo, hi)
    fam = E.family
    W = E.window
    m = P.chamber
    over_src, under_src = E.over.chamber_ref, E.under.chamber_ref
    poly = polynomial_module(P.offset, m, W, K)
    degs = E.over.degrees()
    Jd, Dd, Dpd = {}, {}, {}
    for q in degs:
        Jd[q] = fam.J(under_src, over_src, q)
        if _is_even_class(q, m):
            Dd[q] = _D_row(fam, q, over_src, K)
            if q + 1 <= W.B:
                Dpd[q] = _Dprime_col(fam, q, under_src, K)
        else:
            Dd[q] = K.zeros(0, E.over.dim(q))
            Dpd[q] = K.zeros(E.under.dim(q + 1), 0)

    def comp_zero(X, Y):
        if X.shape[1] == 0 or Y.shape[0] == 0 or X.shape[0] == 0 or Y.shape[1] == 0:
            return True
        return K.is_zero(K.matmul(X, Y))

    def nullity(X, ncols):
        return ncols - (rank(X, K) if X.size else 0)

    rows = []
    q = lo
    qs = [x for x in degs if lo <= x <= hi]
    for q in qs:
        # at HF-under^q: ker J^q vs im D'^{q-1}
        Jq = Jd[q]
        Dp_in = Dpd.get(q - 1, K.zeros(E.under.dim(q), 0))
        kd = nullity(Jq, E.under.dim(q)) if E.under.dim(q) else 0
        idim = rank(Dp_in, K) if Dp_in.size else 0
        cz = comp_zero(Jq, Dp_in)
        rows.append(ExactnessRow(q, "under", kd, idim, cz, cz and kd == idim))
        # at HF-bar^q: ker D^q vs im J^q
        Dq = Dd[q]
        kd = nullity(Dq, E.over.dim(q)) if E.over.dim(q) else 0
        idim = rank(Jq, K) if Jq.size else 0
        cz = comp_zero(Dq, Jq)
        rows.append(ExactnessRow(q, "over", kd, idim, cz, cz and kd == idim))
        # at P^q: ker D'^q vs im D^q
        pd = poly.dim(q)
        Dpq = Dpd.get(q, K.zeros(E.under.dim(q + 1), pd))
        kd = nullity(Dpq, pd) if pd else 0
        idim = rank(Dq, K) if Dq.size else 0
        cz = comp_zero(Dpq, Dq)
        rows.append(ExactnessRow(q, "poly", kd, idim, cz, cz and kd == idim))

    # u-equivariance on the core
    ucomm = True
    for q in degs:
        if q + 2 > W.B:
            continue
        a = K.matmul(Jd[q + 2], E.under.u(q)) if E.under.dim(q) and E.over.dim(q + 2) else None
        b = K.matmul(E.over.u(q), Jd[q]) if E.under.dim(q) and E.over.dim(q + 2) else None
        if a is not None and not K.is_zero(K.sub(a, b)):
            ucomm = False
        if _is_even_class(q, m) and E.over.dim(q):
            a = K.matmul(Dd[q + 2], E.over.u(q)) if E.over.dim(q + 2) else K.zeros(1, E.over.dim(q))
            if not K.is_zero(K.sub(a, Dd[q])):
                ucomm = False
        if _is_even_class(q, m) and q + 3 <= W.B and E.under.dim(q + 3):
            a = Dpd[q + 2]
            b = K.matmul(E.under.u(q + 1), Dpd[q]) if E.under.dim(q + 1) else K.zeros(E.under.dim(q + 3), 1)
            if not K.is_zero(K.sub(a, b)):
                ucomm = False

    lowest = lowest_D_degree(P)
    return FundamentalSequence(
        E.under, E.over, poly, Jd, Dd, Dpd, E.h, (lo, hi), tuple(rows), ucomm, lowest, E.hat, STABILIZATION_NOTE
    )


def lowest_D_degree(P: CohomologyPackage) -> Fraction:
    """Smallest 2m'' with D nonzero on HF-bar^{2m''}.

    D is nonzero on HF-bar^{2m''} exactly when delta_0 of chamber m''+1 is
    nonzero on cohomology, so we scan chambers upwards.
    """
    fam = _family(P)
    K = P.coeff
    sup = P.complex.support()
    start = P.chamber - 1
    if sup is not None:
        start = min(start, _step_class(P.chamber, sup[0] / 2, up=False) - 1)
    mpp = start
    limit = P.chamber + 2 + (0 if sup is None else int(abs(sup[1]) + abs(sup[0])) + 2)
    while mpp <= limit:
        if not K.is_zero(fam.package(mpp + 1).delta0):
            return 2 * mpp
        mpp += 1
    raise InconsistencyError("D never becomes nonzero")


def h_invariant(P: CohomologyPackage) -> Fraction:
    """h = m - zeta, cross-checked against the lowest nonzero degree of D."""
    _require_field(P)
    h = P.chamber - zeta(P)
    low = lowest_D_degree(P)
    if low != 2 * h:
        raise InconsistencyError(f"h from zeta is {fmt(h)} but D first appears in degree {fmt(low)}")
    return h


# -- torsion ----------------------------------------------------------------------------


@dataclass(frozen=True)
class TorsionRow:
    degree: Fraction
    source: tuple
    target: tuple
    injective: bool
    surjective: bool
    expect_injective: bool
    expect_surjective: bool

    @property
    def agrees(self) -> bool:
        return (self.injective or not self.expect_injective) and (self.surjective or not self.expect_surjective)


@dataclass(frozen=True)
class TorsionReport:
    m1: Fraction
    m2: Fraction
    h0: Fraction
    rows: tuple[TorsionRow, ...]

    @property
    def agrees(self) -> bool:
        return all(r.agrees for r in self.rows)

    def to_json(self):
        return {
            "m1": fmt(self.m1),
            "m2": fmt(self.m2),
            "h0": fmt(self.h0),
            "rows": [
                {
                    "degree": fmt(r.degree),
                    "source": list(r.source),
                    "target": list(r.target),
                    "injective": r.injective,
                    "surjective": r.surjective,
                    "expect_injective": r.expect_injective,
                    "expect_surjective": r.expect_surjective,
                }
                for r in self.rows
            ],
        }


MAX_TORSION_ENUM = 200_000


def _torsion_map(H1, H2, chain_map_cols) -> tuple[bool, bool]:
    """Injectivity/surjectivity of the induced map between torsion subgroups."""
    o1, o2 = H1.orders, H2.orders
    n1, n2 = prod(o1), prod(o2)
    if n1 > MAX_TORSION_ENUM or n2 > MAX_TORSION_ENUM:
        raise ValueError("torsion subgroup too large to enumerate")
    images = []
    for k in range(len(o1)):
        fc, tc = H2.coords(chain_map_cols[:, k])
        if any(fc):
            raise InconsistencyError("torsion class mapped to a class of infinite order")
        images.append(tc)
    seen = set()
    zero_hits = 0
    for coeffs in itertools.product(*[range(o) for o in o1]):
        img = tuple(sum(c * im[i] for c, im in zip(coeffs, images)) % o2[i] for i in range(len(o2)))
        if not any(img):
            zero_hits += 1
        seen.add(img)
    return zero_hits == 1, len(seen) == n2


def torsion_transport(C: DeltaComplex, m1, m2) -> TorsionReport:
    """Torsion subgroups of HF(m1; Z) and HF(m2; Z) and the chamber map between them."""
    m1 = _in_class(C.chamber, m1)
    m2 = _in_class(C.chamber, m2)
    if m1 > m2:
        raise ChamberError("need m1 <= m2")
    CZ = C.with_coeff(ZZ)
    h0 = C.chamber - zeta(cohomology(C.with_coeff(QQ)))
    fam = ChamberFamily(CZ)
    P1, P2 = fam.package(m1), fam.package(m2)
    A, B = P1.complex, P2.complex
    rows = []
    for q in sorted(set(A.degree_set()) | set(B.degree_set())):
        H1, H2 = P1.group(q), P2.group(q)
        o1 = () if H1 is None else H1.orders
        o2 = () if H2 is None else H2.orders
        if not o1 and not o2:
            continue
        if not o1:
            inj, sur = True, False
        elif not o2:
            inj, sur = False, True
        else:
            idx1, idx2 = A.index(q), B.index(q)
            loc2 = {B.labels[i]: r for r, i in enumerate(idx2)}
            cols = np.zeros((len(idx2), len(o1)), dtype=object)
            cols[...] = 0
            for k in range(len(o1)):
                for r, i in enumerate(idx1):
                    lab = A.labels[i]
                    if lab in loc2:
                        cols[loc2[lab], k] = H1.tors[r, k]
            inj, sur = _torsion_map(H1, H2, cols)
        rows.append(TorsionRow(q, o1, o2, inj, sur, m2 <= h0, h0 <= m1))
    return TorsionReport(m1, m2, h0, tuple(rows))

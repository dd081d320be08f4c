"""Independent ground truth.

* cellular cohomology and the S^1-equivariant Mayer-Vietoris splice of the
  finite-dimensional Morse model,
* spectral flow of piecewise-linear eigenvalue families as a crossing count,
* a seeded generator of valid delta-complexes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

import numpy as np

from floerkit.deltacx import DeltaComplex, cohomology, induced_map, validate
from floerkit.exactalg import (
    QQ,
    ZZ,
    Coefficients,
    GroupSummary,
    MalformedComplexError,
    cohomology_of_pair,
    frac,
    int_inverse,
    nullspace,
    rank,
)


class OracleError(ValueError):
    pass


# -- cellular cohomology ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CWComplexData:
    """Cell counts per dimension and boundary matrices.

    ``boundary[k]`` is the cellular boundary C_k -> C_{k-1}, shape
    (cells[k-1], cells[k]); ``boundary[0]`` is ignored.
    """

    cells: tuple[int, ...]
    boundary: tuple[np.ndarray, ...]
    name: str = ""

    def __post_init__(self):
        cells = tuple(int(c) for c in self.cells)
        object.__setattr__(self, "cells", cells)
        mats = []
        for k in range(len(cells)):
            shape = (cells[k - 1], cells[k]) if k else (0, cells[0])
            if k < len(self.boundary) and k > 0:
                B = np.asarray(self.boundary[k], dtype=object)
                B = ZZ.asarray(B.reshape(shape)) if B.size else ZZ.zeros(*shape)
            else:
                B = ZZ.zeros(*shape)
            mats.append(B)
        object.__setattr__(self, "boundary", tuple(mats))
        for k in range(2, len(cells)):
            if mats[k - 1].size and mats[k].size and not ZZ.is_zero(ZZ.matmul(mats[k - 1], mats[k])):
                raise MalformedComplexError(f"boundary of boundary nonzero in dimension {k}")

    @property
    def dim(self) -> int:
        return len(self.cells) - 1

    def coboundary(self, k: int) -> np.ndarray:
        """delta^k: C^k -> C^{k+1}, i.e. the transpose of the boundary."""
        ck = self.cells[k] if 0 <= k < len(self.cells) else 0
        if k + 1 >= len(self.cells) or k < 0:
            nxt = self.cells[k + 1] if 0 <= k + 1 < len(self.cells) else 0
            return ZZ.zeros(nxt, ck)
        return self.boundary[k + 1].T.copy()


def cw_cohomology(X: CWComplexData, coeff: Coefficients = QQ) -> dict[int, GroupSummary]:
    """Cohomology of the cellular cochain complex in each dimension."""
    out = {}
    for k in range(len(X.cells)):
        n = X.cells[k]
        d_in = X.coboundary(k - 1) if k > 0 else ZZ.zeros(n, 0)
        d_out = X.coboundary(k)
        out[k] = cohomology_of_pair(d_in, d_out, coeff, n=n)
    return out


def cpn_cw(N: int) -> CWComplexData:
    """Standard CW structure on CP^N: one cell in each even dimension <= 2N."""
    cells = tuple(1 if k % 2 == 0 else 0 for k in range(2 * N + 1))
    return CWComplexData(cells, (), f"CP^{N}")


def _as_cochain_complex(X: CWComplexData) -> DeltaComplex:
    labels, degrees = [], []
    for k, c in enumerate(X.cells):
        for i in range(c):
            labels.append(f"e{k}_{i}")
            degrees.append(k)
    n = len(labels)
    d = np.zeros((n, n), dtype=object)
    d[...] = 0
    start = np.cumsum([0] + list(X.cells))
    for k in range(len(X.cells) - 1):
        blk = X.coboundary(k)
        d[start[k + 1] : start[k + 2], start[k] : start[k + 1]] = blk
    zero = np.zeros((n, n), dtype=object)
    zero[...] = 0
    vec = np.zeros(n, dtype=object)
    vec[...] = 0
    # chamber far above the cells so that delta lives in an empty degree
    return DeltaComplex(len(X.cells) + 5, tuple(labels), tuple(degrees), d, zero, vec, vec.copy())


def restriction_on_cohomology(X: CWComplexData, A: CWComplexData, q: int, coeff: Coefficients) -> np.ndarray:
    """Restriction H^q(X) -> H^q(A) for a subcomplex A spanned by the first
    cells of X in each dimension."""
    CX, CA = _as_cochain_complex(X), _as_cochain_complex(A)
    PX, PA = cohomology(CX, coeff), cohomology(CA, coeff)
    R = np.zeros((CA.n, CX.n), dtype=object)
    R[...] = 0
    sx = np.cumsum([0] + list(X.cells))
    sa = np.cumsum([0] + list(A.cells))
    for k, c in enumerate(A.cells):
        if k >= len(X.cells) or c > X.cells[k]:
            raise OracleError("not a subcomplex of the assumed shape")
        for i in range(c):
            R[sa[k] + i, sx[k] + i] = 1
    return induced_map(CX, PX.groups, CA, PA.groups, R, q, q, coeff)


# -- Mayer-Vietoris splice --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MVResult:
    n: int
    window: tuple[int, int]
    dims: dict
    first_iso: dict
    second_iso: dict
    surjective: dict

    @property
    def ranges_ok(self) -> bool:
        lo, hi = self.window
        ok1 = all(self.first_iso[q] for q in range(lo, hi + 1) if q <= 2 * self.n - 1)
        ok2 = all(self.second_iso[q] for q in range(lo, hi + 1) if q >= 2 * self.n)
        return ok1 and ok2 and all(self.surjective.values())

    def to_json(self):
        return {
            "n": self.n,
            "window": list(self.window),
            "dims": {str(q): d for q, d in self.dims.items()},
            "first_iso": {str(q): b for q, b in self.first_iso.items()},
            "second_iso": {str(q): b for q, b in self.second_iso.items()},
        }


def mv_splice(n: int, HBstar: Mapping[int, int], window=(0, None), coeff: Coefficients = QQ, a_maps=None) -> MVResult:
    """H^q_T(V, V_0) from 0 -> H_T -> H(B*,B_0) + H(CP^inf) -> H(CP^{n-1}) -> 0.

    ``HBstar`` maps degree to dimension of H^q(B*, B_0).  ``a_maps``
    optionally gives the map H^q(B*,B_0) -> H^q(CP^{n-1}) per degree (zero by
    default).  CP^inf is truncated to CP^N with N >= hi/2 + 1, which is exact
    below degree 2N.
    """
    if n < 1:
        raise OracleError("n must be positive")
    lo, hi = window
    if hi is None:
        hi = 2 * n + 6
    if hi < 2 * n:
        raise OracleError(f"window top {hi} is below 2n = {2 * n}; cannot certify stabilisation")
    for q, d in HBstar.items():
        if d and not 0 <= q <= 2 * n - 1:
            raise OracleError(f"H^{q}(B*,B0) must vanish outside [0, {2 * n - 1}]")
    N = hi // 2 + 1
    big, small = cpn_cw(N), cpn_cw(n - 1)
    Hbig, Hsmall = cw_cohomology(big, coeff), cw_cohomology(small, coeff)
    dims, first, second, surj = {}, {}, {}, {}
    for q in range(lo, hi + 1):
        hb = int(HBstar.get(q, 0))
        hc = Hbig[q].rank if q in Hbig else 0
        hs = Hsmall[q].rank if q in Hsmall else 0
        b = restriction_on_cohomology(big, small, q, coeff) if hc and hs else coeff.zeros(hs, hc)
        a = coeff.asarray(a_maps[q]) if a_maps and q in a_maps else coeff.zeros(hs, hb)
        M = np.concatenate([a, b], axis=1) if hs else coeff.zeros(0, hb + hc)
        surj[q] = (rank(M, coeff) if M.size else 0) == hs
        K = nullspace(M, coeff) if M.shape[0] else coeff.eye(hb + hc)
        dim = K.shape[1]
        dims[q] = dim
        p1, p2 = K[:hb], K[hb:]
        r1 = rank(p1, coeff) if p1.size else 0
        r2 = rank(p2, coeff) if p2.size else 0
        first[q] = r1 == dim == hb
        second[q] = r2 == dim == hc
    return MVResult(n, (lo, hi), dims, first, second, surj)


# -- Morse models ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MorseModel:
    """Critical points of g on B* with their indices and flow counts.

    ``differential`` maps (target, source) labels to signed counts for the
    cohomological Morse differential (index goes up by one).  ``flows_to_p``
    holds the signed counts of flows from index-(2n-2) points to the fixed
    point.  ``v`` is optional auxiliary degree-2 data.  ``cw`` is an
    independent cellular model of (B*, B_0) used only for cross-checks.
    """

    n: int
    points: tuple[tuple[str, int], ...]
    differential: Mapping = field(default_factory=dict)
    flows_to_p: Mapping = field(default_factory=dict)
    v: Mapping | None = None
    cw: CWComplexData | None = None
    name: str = ""
    boundary_flags: Mapping = field(default_factory=dict)


def morse_to_delta(M: MorseModel, coeff: Coefficients = QQ) -> DeltaComplex:
    """Delta-complex at chamber m = n with delta' = 0."""
    n = M.n
    labels = [p[0] for p in M.points]
    for lab, ind in M.points:
        if not 0 <= ind <= 2 * n - 1:
            raise OracleError(f"critical point {lab} has index {ind} outside [0, {2 * n - 1}]")
    for lab in M.flows_to_p:
        ind = dict(M.points)[lab]
        if ind != 2 * n - 2:
            raise OracleError(f"flows to the fixed point only come from index {2 * n - 2}, not {ind}")
    pos = {lab: i for i, lab in enumerate(labels)}
    N = len(labels)

    def square(sparse):
        A = np.zeros((N, N), dtype=object)
        A[...] = 0
        for (t, s), x in (sparse or {}).items():
            A[pos[t], pos[s]] = int(x)
        return A

    delta = np.zeros(N, dtype=object)
    delta[...] = 0
    for lab, x in M.flows_to_p.items():
        delta[pos[lab]] = int(x)
    dp = np.zeros(N, dtype=object)
    dp[...] = 0
    C = DeltaComplex(Fraction(n), tuple(labels), tuple(Fraction(p[1]) for p in M.points), square(M.differential), square(M.v), delta, dp, coeff)
    rep = validate(C)
    if not rep.ok:
        raise OracleError("Morse data inconsistent: " + ", ".join(c.name for c in rep.failed()))
    return C


@dataclass(frozen=True)
class OracleAgreement:
    name: str
    n: int
    window: tuple[int, int]
    floer: dict
    splice: dict
    ranges_ok: bool

    @property
    def agrees(self) -> bool:
        return self.floer == self.splice and self.ranges_ok


def morse_agreement(M: MorseModel, coeff: Coefficients = QQ) -> OracleAgreement:
    """Compare HF-bar from the delta-complex with the splice computed from the
    independent cellular model."""
    from floerkit.chambers import equivariant_groups

    if M.cw is None:
        raise OracleError("model has no independent cellular data")
    n = M.n
    window = (0, 2 * n + 6)
    HB = {q: g.rank for q, g in cw_cohomology(M.cw, coeff).items()}
    mv = mv_splice(n, HB, window, coeff)
    P = cohomology(morse_to_delta(M, coeff))
    E = equivariant_groups(P, window[0], window[1])
    floer = {q: E.over.dim(q) for q in range(window[0], window[1] + 1)}
    return OracleAgreement(M.name, n, window, floer, dict(mv.dims), mv.ranges_ok)


# -- spectral flow --------------------------------------------------------------------


@dataclass(frozen=True)
class PLCurve:
    """Piecewise-linear function given by (t, value) breakpoints."""

    points: tuple[tuple[Fraction, Fraction], ...]
    multiplicity: int = 1

    def __post_init__(self):
        pts = tuple((frac(t), frac(x)) for t, x in self.points)
        if len(pts) < 2:
            raise OracleError("a curve needs at least two breakpoints")
        if any(pts[i + 1][0] <= pts[i][0] for i in range(len(pts) - 1)):
            raise OracleError("breakpoints must be strictly increasing")
        if self.multiplicity < 1:
            raise OracleError("multiplicity must be positive")
        object.__setattr__(self, "points", pts)

    @property
    def a(self):
        return self.points[0][0]

    @property
    def b(self):
        return self.points[-1][0]

    def __call__(self, t) -> Fraction:
        t = frac(t)
        pts = self.points
        if not pts[0][0] <= t <= pts[-1][0]:
            raise OracleError(f"t = {t} outside the curve's interval")
        for (t0, x0), (t1, x1) in zip(pts, pts[1:]):
            if t0 <= t <= t1:
                return x0 + (x1 - x0) * (t - t0) / (t1 - t0)
        raise AssertionError

    def restrict(self, lo, hi) -> "PLCurve":
        lo, hi = frac(lo), frac(hi)
        inner = [(t, x) for t, x in self.points if lo < t < hi]
        return PLCurve(((lo, self(lo)),) + tuple(inner) + ((hi, self(hi)),), self.multiplicity)

    def breakpoints(self):
        return [t for t, _ in self.points]


@dataclass(frozen=True)
class EigenvalueFamily:
    curves: tuple[PLCurve, ...]

    def __post_init__(self):
        curves = tuple(self.curves)
        object.__setattr__(self, "curves", curves)
        if curves:
            a, b = curves[0].a, curves[0].b
            if any(c.a != a or c.b != b for c in curves):
                raise OracleError("all curves must share the interval [a, b]")

    @property
    def interval(self):
        return (self.curves[0].a, self.curves[0].b) if self.curves else (Fraction(0), Fraction(1))

    def restrict(self, lo, hi) -> "EigenvalueFamily":
        return EigenvalueFamily(tuple(c.restrict(lo, hi) for c in self.curves))

    def count_in(self, t, barrier: PLCurve) -> int:
        """Eigenvalues (with multiplicity) in the open interval (0, barrier(t))."""
        hb = barrier(t)
        return sum(c.multiplicity for c in self.curves if 0 < c(t) < hb)


@dataclass(frozen=True)
class SpectralFlow:
    value: int
    up: int
    down: int
    n_a: int | None = None
    n_b: int | None = None

    @property
    def barrier_ok(self) -> bool | None:
        if self.n_a is None:
            return None
        return self.value == self.n_b - self.n_a


def _crossings(c: PLCurve) -> tuple[int, int]:
    vals = [x for _, x in c.points]
    if vals[0] == 0 or vals[-1] == 0:
        raise OracleError("eigenvalue vanishes at an endpoint")
    up = down = 0
    for i in range(len(vals) - 1):
        x0, x1 = vals[i], vals[i + 1]
        if x0 == 0 and x1 == 0:
            raise OracleError("curve vanishes on a whole segment (non-generic)")
        if x0 != 0 and x1 != 0 and (x0 < 0) != (x1 < 0):
            if x1 > 0:
                up += 1
            else:
                down += 1
    for i in range(1, len(vals) - 1):
        if vals[i] == 0:
            before, after = vals[i - 1], vals[i + 1]
            if (before < 0) == (after < 0):
                raise OracleError(f"tangential zero at t = {c.points[i][0]} (non-generic)")
            if after > 0:
                up += 1
            else:
                down += 1
    return up, down


def _check_barrier(E: EigenvalueFamily, barrier: PLCurve):
    a, b = E.interval
    if barrier.a != a or barrier.b != b:
        raise OracleError("barrier must live on the family's interval")
    grid = set(barrier.breakpoints())
    for c in E.curves:
        grid |= set(c.breakpoints())
    grid = sorted(grid)
    if any(barrier(t) <= 0 for t in grid):
        raise OracleError("barrier must be positive")
    for c in E.curves:
        diffs = [c(t) - barrier(t) for t in grid]
        if any(x == 0 for x in diffs) or len({x > 0 for x in diffs}) > 1:
            raise OracleError("an eigenvalue curve meets the barrier")


def spectral_flow(E: EigenvalueFamily, barrier: PLCurve | None = None) -> SpectralFlow:
    """Up-crossings minus down-crossings of zero, with multiplicity."""
    up = down = 0
    for c in E.curves:
        u, d = _crossings(c)
        up += u * c.multiplicity
        down += d * c.multiplicity
    if barrier is None:
        return SpectralFlow(up - down, up, down)
    _check_barrier(E, barrier)
    a, b = E.interval
    return SpectralFlow(up - down, up, down, E.count_in(a, barrier), E.count_in(b, barrier))


def berger_family(N: int, extra: Sequence[Fraction] = (Fraction(3, 2), Fraction(2))) -> EigenvalueFamily:
    """N increasing lines with one zero each, plus constant curves above sqrt 2."""
    a, b = Fraction(-1), Fraction(1)
    curves = []
    for k in range(N):
        t0 = Fraction(2 * k + 1, 2 * N) * 2 - 1  # distinct zeros inside (-1, 1)
        curves.append(PLCurve(((a, a - t0), (b, b - t0))))
    for x in extra:
        curves.append(PLCurve(((a, frac(x)), (b, frac(x)))))
    return EigenvalueFamily(tuple(curves))


def random_family(seed: int, n_curves: int = 6, n_breaks: int = 5, barrier_height: int = 2):
    """Seeded transverse family on [0, 1] with a constant barrier no curve meets.

    Returns (family, barrier, an interior split point where no curve vanishes).
    """
    rng = np.random.default_rng(seed)
    ts = sorted({Fraction(int(x), 64) for x in rng.choice(np.arange(1, 64), size=n_breaks, replace=False)})
    grid = [Fraction(0)] + ts + [Fraction(1)]
    H = Fraction(barrier_height)
    curves = []
    for _ in range(n_curves):
        if rng.random() < 0.2:
            vals = [H + Fraction(int(rng.integers(1, 9)), 4) for _ in grid]
        else:
            vals = []
            for i in range(len(grid)):
                x = Fraction(int(rng.integers(-11, 8)), 4)
                while x == 0 or x >= H:
                    x = Fraction(int(rng.integers(-11, 8)), 4)
                vals.append(x)
            # occasionally put a transverse zero on an interior breakpoint
            i = int(rng.integers(1, len(grid) - 1))
            if rng.random() < 0.3 and (vals[i - 1] < 0) != (vals[i + 1] < 0):
                vals[i] = Fraction(0)
        mult = 1 if rng.random() < 0.8 else 2
        curves.append(PLCurve(tuple(zip(grid, vals)), mult))
    fam = EigenvalueFamily(tuple(curves))
    split = None
    for t in grid[1:-1]:
        if all(c(t) != 0 for c in curves):
            split = t
            break
    if split is None:
        split = (grid[0] + grid[1]) / 2
        if any(c(split) == 0 for c in curves):
            split = None
    return fam, PLCurve(((Fraction(0), H), (Fraction(1), H))), split


# -- random delta-complexes ---------------------------------------------------------


_OFFSETS = (Fraction(0), Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(3, 8), Fraction(5, 6))


def _unimodular_block(rng, k: int, ops: int):
    P = ZZ.eye(k)
    Pinv = ZZ.eye(k)
    if k < 2:
        if k == 1 and rng.random() < 0.5:
            P[0, 0] = -1
            Pinv[0, 0] = -1
        return P, Pinv
    for _ in range(ops):
        i, j = rng.choice(k, size=2, replace=False)
        t = int(rng.choice([-2, -1, 1, 2]))
        # row_i += t row_j  (E = I + t e_ij); inverse is I - t e_ij
        P[i] = P[i] + t * P[j]
        Pinv[:, j] = Pinv[:, j] - t * Pinv[:, i]
    return P, Pinv


def generate_random_delta(
    seed: int,
    size: int = 16,
    coeff: Coefficients = QQ,
    spread: int = 5,
    torsion: int | None = None,
    fractional: bool = True,
    mode: str | None = None,
) -> DeltaComplex:
    """Seeded valid delta-complex with at most ``size`` generators.

    Construction: a normal form (homology generators plus pairs e -> c f) with
    a chain map v0 of degree 2, then either delta' = d y, v = v0 - y delta
    (delta on the homology side) or delta = eps d, v = v0 + delta' eps,
    followed by a random unimodular change of basis in every degree.  With
    ``torsion = p`` some pairs have c = p.
    """
    rng = np.random.default_rng(seed)
    k0 = int(rng.integers(-2, 3))
    off = _OFFSETS[int(rng.integers(len(_OFFSETS)))] if fractional and rng.random() < 0.4 else Fraction(0)
    m = Fraction(k0) + off / 2 if off else Fraction(k0)
    if rng.random() < 0.15 and fractional:
        m += Fraction(1, 2)
    if size <= 0:
        return DeltaComplex.empty(m, coeff)
    if mode is None:
        mode = ["delta", "delta_prime", "delta", "delta_prime", "none"][int(rng.integers(5))]
    n_pairs = int(rng.integers(0, size // 2 + 1))
    n_hom = size - 2 * n_pairs
    # levels relative to 2m; bias homology toward the tower degrees
    gens = []  # (kind, level, c)
    for _ in range(n_hom):
        r = rng.random()
        if r < 0.35:
            lvl = -2 * int(rng.integers(1, spread // 2 + 2))
        elif r < 0.7:
            lvl = 2 * int(rng.integers(0, spread // 2 + 1)) + 1
        else:
            lvl = int(rng.integers(-spread, spread + 1))
        gens.append(("h", lvl, 0))
    pairs = []
    for _ in range(n_pairs):
        lvl = int(rng.integers(-spread, spread))
        c = torsion if torsion and rng.random() < 0.5 else 1
        pairs.append((lvl, c))
    labels, levels = [], []
    kinds = []
    for i, (_, lvl, _) in enumerate(gens):
        labels.append(f"h{i}")
        levels.append(lvl)
        kinds.append(("h", None))
    for i, (lvl, c) in enumerate(pairs):
        labels += [f"e{i}", f"f{i}"]
        levels += [lvl, lvl + 1]
        kinds += [("e", i), ("f", i)]
    n = len(labels)
    d = ZZ.zeros(n, n)
    e_pos = {kinds[j][1]: j for j in range(n) if kinds[j][0] == "e"}
    f_pos = {kinds[j][1]: j for j in range(n) if kinds[j][0] == "f"}
    cval = {i: c for i, (_, c) in enumerate(pairs)}
    for i in e_pos:
        d[f_pos[i], e_pos[i]] = cval[i]

    def small(p_zero=0.5):
        return 0 if rng.random() < p_zero else int(rng.choice([-2, -1, 1, 1, 2]))

    # v0: degree-2 chain map in normal form
    v0 = ZZ.zeros(n, n)
    by_level: dict = {}
    for j in range(n):
        by_level.setdefault(levels[j], []).append(j)
    cycles = lambda lvl: [j for j in by_level.get(lvl, []) if kinds[j][0] in ("h", "f")]
    for j in range(n):
        kind, idx = kinds[j]
        tgt = levels[j] + 2
        if kind == "h":
            for t in cycles(tgt):
                v0[t, j] = small(0.4)
        elif kind == "e":
            for t in cycles(tgt):
                v0[t, j] = small(0.6)
            ci = cval[idx]
            for t in by_level.get(tgt, []):
                if kinds[t][0] == "e":
                    cj = cval[kinds[t][1]]
                    step = ci // gcd(ci, cj)
                    v0[t, j] = small(0.6) * step
    for i in e_pos:
        col = ZZ.matmul(d, v0[:, e_pos[i]])
        v0[:, f_pos[i]] = [x // cval[i] for x in col]

    delta = ZZ.zeros(n)
    dprime = ZZ.zeros(n)
    v = v0.copy()
    if mode == "delta":
        for j in by_level.get(-2, []):
            if kinds[j][0] in ("h", "e"):
                delta[j] = small(0.3)
        y = ZZ.zeros(n)
        for j in by_level.get(0, []):
            y[j] = small(0.5)
        dprime = ZZ.matmul(d, y)
        v = v0 - np.outer(y, delta)
    elif mode == "delta_prime":
        for j in cycles(1):
            dprime[j] = small(0.3)
        eps = ZZ.zeros(n)
        for j in by_level.get(-1, []):
            eps[j] = small(0.5)
        delta = ZZ.matmul(eps, d)
        v = v0 + np.outer(dprime, eps)

    # change of basis inside each degree, then shuffle the generator order
    P = ZZ.eye(n)
    Pinv = ZZ.eye(n)
    for lvl, idx in by_level.items():
        B, Binv = _unimodular_block(rng, len(idx), 2 * len(idx))
        P[np.ix_(idx, idx)] = B
        Pinv[np.ix_(idx, idx)] = Binv
    d = ZZ.matmul(ZZ.matmul(P, d), Pinv)
    v = ZZ.matmul(ZZ.matmul(P, v), Pinv)
    delta = ZZ.matmul(delta, Pinv)
    dprime = ZZ.matmul(P, dprime)
    perm = rng.permutation(n)
    d = d[np.ix_(perm, perm)]
    v = v[np.ix_(perm, perm)]
    delta = delta[perm]
    dprime = dprime[perm]
    labels = [f"g{i}" for i in range(n)]
    degrees = [2 * m + levels[p] for p in perm]
    C = DeltaComplex(m, tuple(labels), tuple(degrees), d, v, delta, dprime, coeff)
    rep = validate(C)
    if not rep.ok:  # construction guarantees validity; keep the check honest
        raise AssertionError(f"generator produced an invalid complex: {[c.name for c in rep.failed()]}")
    return C

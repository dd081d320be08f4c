"""Chain data of one chamber, its cohomology and the reducible towers."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from floerkit.exactalg import (
    QQ,
    ZZ,
    Coefficients,
    GradedSpace,
    IntegralCohomology,
    column_basis,
    extend_basis,
    fmt,
    frac,
    integral_cohomology,
    nullspace,
    offset_of,
    solve,
)


class ValidationError(ValueError):
    """Input data violates one of the defining relations."""


class InconsistencyError(ValueError):
    """Derived structure contradicts an identity that valid input must satisfy."""


def _int_array(A, shape) -> np.ndarray:
    arr = np.asarray(A, dtype=object)
    if arr.size == 0:
        arr = np.zeros(shape, dtype=object)
        arr[...] = 0
        return arr
    arr = arr.reshape(shape)
    out = np.empty(shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        x = frac(x)
        if x.denominator != 1:
            raise ValueError(f"non-integer matrix entry {x}")
        out[idx] = int(x)
    return out


@dataclass(frozen=True, eq=False)
class DeltaComplex:
    """Generators with rational degrees, the maps d, v, delta, delta' and the
    chamber m.

    Convention: ``d[i, j]`` is the coefficient of generator i in d(generator j).
    ``delta`` is a row vector (nonzero only on degree 2m-2) and
    ``delta_prime`` a column vector (nonzero only on degree 2m+1).  Entries
    are integers; ``coeff`` says where the cohomology is taken.
    """

    chamber: Fraction
    labels: tuple[str, ...]
    degrees: tuple[Fraction, ...]
    d: np.ndarray
    v: np.ndarray
    delta: np.ndarray
    delta_prime: np.ndarray
    coeff: Coefficients = QQ

    def __post_init__(self):
        m = frac(self.chamber)
        object.__setattr__(self, "chamber", m)
        labels = tuple(str(x) for x in self.labels)
        degrees = tuple(frac(q) for q in self.degrees)
        if len(labels) != len(degrees):
            raise ValueError("labels and degrees differ in length")
        if len(set(labels)) != len(labels):
            raise ValueError("generator labels must be unique")
        off = offset_of(2 * m)
        for lab, q in zip(labels, degrees):
            if offset_of(q) != off:
                raise ValueError(f"generator {lab} at degree {fmt(q)} is not in 2m + Z = {fmt(off)} + Z")
        n = len(labels)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "d", _int_array(self.d, (n, n)))
        object.__setattr__(self, "v", _int_array(self.v, (n, n)))
        object.__setattr__(self, "delta", _int_array(self.delta, (n,)))
        object.__setattr__(self, "delta_prime", _int_array(self.delta_prime, (n,)))

    @classmethod
    def empty(cls, chamber, coeff: Coefficients = QQ) -> "DeltaComplex":
        return cls(frac(chamber), (), (), [], [], [], [], coeff)

    @property
    def m(self) -> Fraction:
        return self.chamber

    @property
    def offset(self) -> Fraction:
        return offset_of(2 * self.chamber)

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def _by_degree(self) -> dict[Fraction, np.ndarray]:
        out: dict[Fraction, list[int]] = {}
        for i, q in enumerate(self.degrees):
            out.setdefault(q, []).append(i)
        return {q: np.array(ix, dtype=np.int64) for q, ix in sorted(out.items())}

    def index(self, q) -> np.ndarray:
        """Generator indices of degree q (input order)."""
        return self._by_degree.get(frac(q), np.zeros(0, dtype=np.int64))

    def degree_set(self) -> list[Fraction]:
        return list(self._by_degree)

    def block(self, M: np.ndarray, q_to, q_from) -> np.ndarray:
        return M[np.ix_(self.index(q_to), self.index(q_from))]

    def ind2(self, q) -> int:
        k = frac(q) - 2 * self.chamber
        if k.denominator != 1:
            raise ValueError(f"degree {q} not in 2m + Z")
        return int(k) % 2

    def with_coeff(self, coeff: Coefficients) -> "DeltaComplex":
        return DeltaComplex(self.chamber, self.labels, self.degrees, self.d, self.v, self.delta, self.delta_prime, coeff)

    def support(self) -> tuple[Fraction, Fraction] | None:
        if not self.degrees:
            return None
        return min(self.degrees), max(self.degrees)

    def __repr__(self):
        return f"DeltaComplex(m={fmt(self.chamber)}, n={self.n}, coeff={self.coeff})"


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class RelationCheck:
    name: str
    ok: bool
    offending: tuple = ()

    def to_json(self):
        return {"relation": self.name, "ok": self.ok, "offending": [list(map(str, x)) for x in self.offending]}


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[RelationCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failed(self) -> list[RelationCheck]:
        return [c for c in self.checks if not c.ok]

    def raise_if_failed(self):
        if not self.ok:
            names = ", ".join(c.name for c in self.failed())
            raise ValidationError(f"relations fail: {names}")

    def to_json(self):
        return {"ok": self.ok, "checks": [c.to_json() for c in self.checks]}


def _nonzero_entries(M: np.ndarray, coeff: Coefficients, labels_r, labels_c, limit=20):
    out = []
    R = coeff.asarray(M) if coeff.kind == "Fp" else M
    for idx, x in np.ndenumerate(R):
        if x != 0:
            if M.ndim == 2:
                out.append((labels_r[idx[0]], labels_c[idx[1]], x))
            else:
                out.append((labels_r[idx[0]], x))
            if len(out) >= limit:
                break
    return tuple(out)


def validate(C: DeltaComplex) -> ValidationReport:
    """Grading consistency plus d^2 = 0, delta d = 0, d delta' = 0 and
    dv - vd + delta' delta = 0."""
    K = C.coeff if C.coeff.kind == "Fp" else ZZ
    L = C.labels
    n = C.n
    m = C.chamber
    checks = []

    bad = []
    for i in range(n):
        for j in range(n):
            if C.d[i, j] != 0 and K.scalar(C.d[i, j]) != 0 and C.degrees[i] != C.degrees[j] + 1:
                bad.append(("d", L[i], L[j]))
            if C.v[i, j] != 0 and K.scalar(C.v[i, j]) != 0 and C.degrees[i] != C.degrees[j] + 2:
                bad.append(("v", L[i], L[j]))
        if K.scalar(C.delta[i]) != 0 and C.degrees[i] != 2 * m - 2:
            bad.append(("delta", L[i]))
        if K.scalar(C.delta_prime[i]) != 0 and C.degrees[i] != 2 * m + 1:
            bad.append(("delta_prime", L[i]))
    checks.append(RelationCheck("grading", not bad, tuple(bad[:20])))

    d = K.asarray(C.d)
    v = K.asarray(C.v)
    de = K.asarray(C.delta)
    dp = K.asarray(C.delta_prime)
    dd = K.matmul(d, d) if n else d
    checks.append(RelationCheck("d∘d=0", K.is_zero(dd), _nonzero_entries(dd, K, L, L)))
    dedd = K.matmul(de, d) if n else de
    checks.append(RelationCheck("δ∘d=0", K.is_zero(dedd), _nonzero_entries(dedd, K, L, L)))
    ddp = K.matmul(d, dp) if n else dp
    checks.append(RelationCheck("d∘δ′=0", K.is_zero(ddp), _nonzero_entries(ddp, K, L, L)))
    if n:
        rel = K.reduce(K.matmul(d, v) - K.matmul(v, d) + np.outer(dp, de))
    else:
        rel = d
    checks.append(RelationCheck("dv−vd+δ′δ=0", K.is_zero(rel), _nonzero_entries(rel, K, L, L)))
    return ValidationReport(tuple(checks))


# -- cohomology -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DegreeCohomology:
    """Field cohomology in one degree with chosen cocycle representatives.

    ``reps`` columns live in local coordinates (generators of this degree);
    ``coords`` sends a local cocycle to coordinates in that basis.
    """

    degree: Fraction
    index: np.ndarray
    reps: np.ndarray
    _left: np.ndarray = field(repr=False)
    _nb: int = field(repr=False)
    coeff: Coefficients = QQ

    @property
    def dim(self) -> int:
        return self.reps.shape[1]

    def coords(self, x: np.ndarray) -> np.ndarray:
        K = self.coeff
        if x.ndim == 1:
            return K.matmul(self._left, x)[self._nb :]
        return K.matmul(self._left, x)[self._nb :]

    def lift(self, y: np.ndarray) -> np.ndarray:
        return self.coeff.matmul(self.reps, y)


def _degree_cohomology(C: DeltaComplex, q: Fraction, K: Coefficients) -> DegreeCohomology:
    idx = C.index(q)
    nq = len(idx)
    d = C.d
    d_out = K.asarray(d[np.ix_(C.index(q + 1), idx)])
    d_in = K.asarray(d[np.ix_(idx, C.index(q - 1))])
    Z = nullspace(d_out, K) if d_out.shape[0] else K.eye(nq)
    B = column_basis(d_in, K) if d_in.shape[1] else K.zeros(nq, 0)
    H = extend_basis(B, Z, K)
    M = np.concatenate([B, H], axis=1)
    if M.shape[1]:
        left = solve(M.T.copy(), K.eye(M.shape[1]), K)
        if left is None:
            raise ArithmeticError("basis matrix not of full column rank")
        left = left.T.copy()
    else:
        left = K.zeros(0, nq)
    return DegreeCohomology(q, idx, H, left, B.shape[1], K)


class LazyDegrees(Mapping):
    """Read-only degree -> value map that computes entries on first access."""

    def __init__(self, keys, fn):
        self._keys = [frac(k) for k in keys]
        self._set = set(self._keys)
        self._fn = fn
        self._cache: dict = {}

    def __getitem__(self, q):
        q = frac(q)
        if q not in self._set:
            raise KeyError(q)
        if q not in self._cache:
            self._cache[q] = self._fn(q)
        return self._cache[q]

    def __contains__(self, q):
        return frac(q) in self._set

    def __iter__(self):
        return iter(self._keys)

    def __len__(self):
        return len(self._keys)


@dataclass(frozen=True, eq=False)
class CohomologyPackage:
    """HF in every degree with u, delta_0 and delta'_0 (field case) or integral
    summaries (integer case).  Degrees are computed on first access."""

    complex: DeltaComplex
    coeff: Coefficients
    groups: Mapping
    u_maps: Mapping

    @property
    def chamber(self) -> Fraction:
        return self.complex.chamber

    @property
    def m(self) -> Fraction:
        return self.complex.chamber

    @property
    def offset(self) -> Fraction:
        return self.complex.offset

    @property
    def is_field(self) -> bool:
        return self.coeff.is_field

    def group(self, q):
        return self.groups.get(frac(q))

    def dim(self, q) -> int:
        if not self.is_field:
            raise TypeError("dimension of an integral group")
        g = self.groups.get(frac(q))
        return 0 if g is None else g.dim

    def parity(self, q) -> int:
        return self.complex.ind2(q)

    def degrees(self) -> list[Fraction]:
        """Degrees with nonzero cohomology."""
        if self.is_field:
            return [q for q, g in self.groups.items() if g.dim]
        return [q for q, g in self.groups.items() if not g.summary.is_zero]

    @cached_property
    def space(self) -> GradedSpace:
        return GradedSpace.from_degrees(self.offset, [(q, self.dim(q)) for q in self.groups])

    def u_defined(self, q) -> bool:
        q = frac(q)
        m = self.chamber
        return q not in (2 * m - 2, 2 * m - 1)

    def u(self, q) -> np.ndarray:
        """u: HF^q -> HF^{q+2}."""
        q = frac(q)
        if not self.u_defined(q):
            raise ValueError(f"u is undefined on degree {fmt(q)} in chamber {fmt(self.chamber)}")
        M = self.u_maps.get(q)
        if M is None:
            return self.coeff.zeros(self.dim(q + 2), self.dim(q))
        return M

    @cached_property
    def delta0(self) -> np.ndarray:
        """delta_0 on HF^{2m-2} as a row vector."""
        K, C = self.coeff, self.complex
        g = self.groups.get(2 * C.chamber - 2)
        if g is None or g.dim == 0:
            return K.zeros(0)
        return K.matmul(K.asarray(C.delta[g.index]), g.reps)

    @cached_property
    def delta0_prime(self) -> np.ndarray:
        """Class of delta'(1) in HF^{2m+1}."""
        K, C = self.coeff, self.complex
        g = self.groups.get(2 * C.chamber + 1)
        if g is None or g.dim == 0:
            return K.zeros(0)
        return g.coords(K.asarray(C.delta_prime[g.index]))

    def summary(self, q):
        g = self.groups.get(frac(q))
        if g is None:
            return None
        return g.summary if isinstance(g, IntegralCohomology) else g.dim


def induced_map(C_src: DeltaComplex, H_src: dict, C_tgt: DeltaComplex, H_tgt: dict, F: np.ndarray, q_src, q_tgt, K: Coefficients) -> np.ndarray:
    """Matrix on field cohomology of a chain-level map F (n_tgt x n_src)."""
    q_src, q_tgt = frac(q_src), frac(q_tgt)
    gs, gt = H_src.get(q_src), H_tgt.get(q_tgt)
    ds = 0 if gs is None else gs.dim
    dt = 0 if gt is None else gt.dim
    if ds == 0 or dt == 0:
        return K.zeros(dt, ds)
    blk = K.asarray(F[np.ix_(gt.index, gs.index)])
    return gt.coords(K.matmul(blk, gs.reps))


def cohomology(C: DeltaComplex, coeff: Coefficients | None = None, check: bool = True) -> CohomologyPackage:
    """ker d / im d per degree with induced u, delta_0, delta'_0."""
    K = coeff or C.coeff
    if coeff is not None and coeff != C.coeff:
        C = C.with_coeff(coeff)
    if check:
        validate(C).raise_if_failed()
    m = C.chamber
    if not K.is_field:
        groups = {}
        for q in C.degree_set():
            idx = C.index(q)
            groups[q] = integral_cohomology(
                C.d[np.ix_(idx, C.index(q - 1))], C.d[np.ix_(C.index(q + 1), idx)], len(idx)
            )
        return CohomologyPackage(C, K, groups, {})

    groups = LazyDegrees(C.degree_set(), lambda q: _degree_cohomology(C, q, K))
    allowed = [q for q in C.degree_set() if q not in (2 * m - 2, 2 * m - 1)]
    u_maps = LazyDegrees(allowed, lambda q: induced_map(C, groups, C, groups, C.v, q, q + 2, K))
    return CohomologyPackage(C, K, groups, u_maps)


def _require_field(P: CohomologyPackage):
    if not P.is_field:
        raise TypeError("this operation needs field coefficients")


# -- towers, reduced group, zeta ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class Towers:
    """delta_n on HF^{2(m-n-1)} (row vectors) and delta'_n in HF^{2m+2n+1}."""

    chamber: Fraction
    delta: tuple[np.ndarray, ...]
    delta_prime: tuple[np.ndarray, ...]

    def delta_degree(self, n: int) -> Fraction:
        return 2 * (self.chamber - n - 1)

    def delta_prime_degree(self, n: int) -> Fraction:
        return 2 * self.chamber + 2 * n + 1

    def nonzero_delta(self, coeff) -> list[int]:
        return [i for i, x in enumerate(self.delta) if not coeff.is_zero(x)]

    def nonzero_delta_prime(self, coeff) -> list[int]:
        return [i for i, x in enumerate(self.delta_prime) if not coeff.is_zero(x)]


def _tower_length(P: CohomologyPackage) -> int:
    sup = P.complex.support()
    if sup is None:
        return 0
    lo, hi = sup
    m = P.chamber
    n_down = int((2 * m - 2 - lo) // 2) + 1 if 2 * m - 2 >= lo else 0
    n_up = int((hi - 2 * m - 1) // 2) + 1 if hi >= 2 * m + 1 else 0
    return max(n_down, n_up, 0)


def delta_towers(P: CohomologyPackage, n_max: int | None = None) -> Towers:
    """delta_n = delta_0 u^n and delta'_n = u^n delta'_0 for n = 0..n_max."""
    _require_field(P)
    K = P.coeff
    m = P.chamber
    if n_max is None:
        n_max = _tower_length(P)
    deltas = [P.delta0]
    primes = [P.delta0_prime]
    for n in range(1, n_max + 1):
        q = 2 * (m - n - 1)
        prev = deltas[-1]
        U = P.u(q)
        deltas.append(K.matmul(prev, U) if U.shape[0] else K.zeros(U.shape[1]))
        q = 2 * m + 2 * n - 1
        U = P.u(q)
        primes.append(K.matmul(U, primes[-1]) if U.shape[1] else K.zeros(U.shape[0]))
    return Towers(m, tuple(deltas), tuple(primes))


@dataclass(frozen=True, eq=False)
class ReducedGroup:
    """Z/B in each degree.  ``reps[q]`` columns are HF-coordinates of a basis."""

    package: CohomologyPackage
    reps: dict
    u_maps: dict
    _left: dict = field(repr=False)
    _nb: dict = field(repr=False)

    @property
    def offset(self) -> Fraction:
        return self.package.offset

    def dim(self, q) -> int:
        r = self.reps.get(frac(q))
        return 0 if r is None else r.shape[1]

    @cached_property
    def space(self) -> GradedSpace:
        return GradedSpace.from_degrees(self.offset, [(q, r.shape[1]) for q, r in self.reps.items()])

    def coords(self, q, y: np.ndarray) -> np.ndarray:
        """Reduced coordinates of an element of Z^q (given in HF-coordinates)."""
        q = frac(q)
        K = self.package.coeff
        if self.dim(q) == 0:
            return K.zeros(0)
        return K.matmul(self._left[q], y)[self._nb[q] :]

    def u(self, q) -> np.ndarray:
        q = frac(q)
        M = self.u_maps.get(q)
        if M is None:
            return self.package.coeff.zeros(self.dim(q + 2), self.dim(q))
        return M

    def degrees(self) -> list[Fraction]:
        return [q for q, r in self.reps.items() if r.shape[1]]


def cycle_and_boundary(P: CohomologyPackage, towers: Towers | None = None):
    """Z^q = intersection of ker delta_j and B^q = sum of im delta'_j, as
    column bases in HF-coordinates."""
    K = P.coeff
    T = towers or delta_towers(P)
    m = P.chamber
    Z, B = {}, {}
    for q, g in P.groups.items():
        h = g.dim
        z = K.eye(h)
        b = K.zeros(h, 0)
        j = (2 * m - 2 - q) / 2
        if j.denominator == 1 and j >= 0 and int(j) < len(T.delta):
            row = T.delta[int(j)].reshape(1, -1)
            z = nullspace(row, K) if h else z
        j = (q - 2 * m - 1) / 2
        if j.denominator == 1 and j >= 0 and int(j) < len(T.delta_prime):
            col = T.delta_prime[int(j)].reshape(-1, 1)
            b = column_basis(col, K) if h else b
        Z[q], B[q] = z, b
    return Z, B


def reduced(P: CohomologyPackage) -> ReducedGroup:
    """Z*/B* with the u-action induced by v on cocycle representatives."""
    _require_field(P)
    K = P.coeff
    C = P.complex
    Z, B = cycle_and_boundary(P)
    reps, left, nb = {}, {}, {}
    for q in P.groups:
        z, b = Z[q], B[q]
        if b.shape[1] and solve(z, b, K) is None:
            raise InconsistencyError(f"B ⊄ Z in degree {fmt(q)}")
        hat = extend_basis(b, z, K)
        reps[q] = hat
        M = np.concatenate([b, hat], axis=1)
        if M.shape[1]:
            L = solve(M.T.copy(), K.eye(M.shape[1]), K)
            left[q] = L.T.copy()
        else:
            left[q] = K.zeros(0, z.shape[0])
        nb[q] = b.shape[1]
    u_maps = {}
    for q in P.groups:
        if reps[q].shape[1] == 0:
            continue
        q2 = q + 2
        if q2 not in P.groups or reps[q2].shape[1] == 0:
            u_maps[q] = K.zeros(0, reps[q].shape[1])
            continue
        g, tgt = P.groups[q], P.groups[q2]
        blk = K.asarray(C.v[np.ix_(tgt.index, g.index)])
        y = tgt.coords(K.matmul(blk, g.lift(reps[q])))
        if not K.is_zero(y) and solve(Z[q2], y, K) is None:
            raise InconsistencyError(f"v does not preserve Z in degree {fmt(q)}")
        u_maps[q] = K.matmul(left[q2], y)[nb[q2] :]
    return ReducedGroup(P, reps, u_maps, left, nb)


def euler_characteristic(P: CohomologyPackage) -> int:
    _require_field(P)
    return sum((-1) ** P.parity(q) * g.dim for q, g in P.groups.items())


def reduced_euler_characteristic(R: ReducedGroup) -> int:
    P = R.package
    return sum((-1) ** P.parity(q) * r.shape[1] for q, r in R.reps.items())


def zeta(P: CohomologyPackage, crosscheck: bool = True) -> int:
    """Signed length of the nonvanishing tower.

    Cross-checked against chi(HF) - chi(reduced); a mismatch raises.
    """
    _require_field(P)
    K = P.coeff
    d0 = not K.is_zero(P.delta0)
    d0p = not K.is_zero(P.delta0_prime)
    if d0 and d0p:
        raise InconsistencyError("delta_0 and delta'_0 are both nonzero")
    T = delta_towers(P)
    if d0:
        z = max(n + 1 for n in T.nonzero_delta(K))
    elif d0p:
        z = -max(n + 1 for n in T.nonzero_delta_prime(K))
    else:
        z = 0
    if crosscheck:
        other = euler_characteristic(P) - reduced_euler_characteristic(reduced(P))
        if other != z:
            raise InconsistencyError(f"zeta by towers is {z} but chi(HF) - chi(hat) = {other}")
    return z


def h_from_zeta(P: CohomologyPackage) -> Fraction:
    return P.chamber - zeta(P)


@dataclass(frozen=True)
class EulerData:
    chi: int
    chi_hat: int
    lambda_tilde: Fraction

    @property
    def casson(self) -> Fraction:
        """Casson's invariant predicted by lambda_tilde = -lambda."""
        return -self.lambda_tilde

    def to_json(self):
        return {"chi_HF": self.chi, "chi_hat": self.chi_hat, "lambda_tilde": fmt(self.lambda_tilde)}


def euler_characteristics(P: CohomologyPackage, casson: int | None = None) -> EulerData:
    """chi(HF), chi(reduced) and lambda_tilde = chi(HF) - m.

    If ``casson`` is supplied it is checked against -lambda_tilde.
    """
    chi = euler_characteristic(P)
    chi_hat = reduced_euler_characteristic(reduced(P))
    out = EulerData(chi, chi_hat, chi - P.chamber)
    if casson is not None and out.casson != casson:
        raise InconsistencyError(f"Casson invariant {casson} disagrees with -lambda_tilde = {fmt(out.casson)}")
    return out


# -- duality -----------------------------------------------------------------------


def dualize(C: DeltaComplex) -> DeltaComplex:
    """Degree q -> -1-q, chamber m -> -m; d -> -d^T, v -> v^T, delta <-> delta'^T.

    The sign on d keeps dv - vd + delta' delta = 0 intact after transposing;
    applying this twice returns C exactly.
    """
    dT = C.d.T.copy()
    for idx, x in np.ndenumerate(dT):
        dT[idx] = -x
    return DeltaComplex(
        -C.chamber,
        C.labels,
        tuple(-1 - q for q in C.degrees),
        dT,
        C.v.T.copy(),
        C.delta_prime.copy(),
        C.delta.copy(),
        C.coeff,
    )


# -- helpers used across modules ----------------------------------------------------


def make_complex(chamber, gens: Sequence[tuple[str, object]], d=None, v=None, delta=None, delta_prime=None, coeff=QQ) -> DeltaComplex:
    """Build a complex from sparse dictionaries keyed by labels.

    ``d`` and ``v`` map (target_label, source_label) -> int; ``delta`` and
    ``delta_prime`` map label -> int.
    """
    labels = [g[0] for g in gens]
    pos = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)

    def square(sparse):
        M = np.zeros((n, n), dtype=object)
        M[...] = 0
        for (a, b), x in (sparse or {}).items():
            M[pos[a], pos[b]] = int(x)
        return M

    def vec(sparse):
        out = np.zeros(n, dtype=object)
        out[...] = 0
        for a, x in (sparse or {}).items():
            out[pos[a]] = int(x)
        return out

    return DeltaComplex(frac(chamber), tuple(labels), tuple(frac(g[1]) for g in gens), square(d), square(v), vec(delta), vec(delta_prime), coeff)

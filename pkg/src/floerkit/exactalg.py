"""Exact linear algebra over Z, Q and F_p.

Matrices are numpy arrays.  Over Q and Z the dtype is ``object`` holding
Python ints / Fractions, so nothing ever rounds.  Over F_p the dtype is
int64 with entries reduced into [0, p).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from floerkit import _kernels


class MalformedComplexError(ValueError):
    """Two maps that should compose to zero do not."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Coefficients:
    """Coefficient ring: ``"Z"``, ``"Q"`` or ``"Fp"`` with a prime ``p``."""

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Fp"):
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        if self.kind == "Fp":
            if not _is_prime(self.p):
                raise ValueError(f"{self.p} is not prime")
            # keeps (p-1)^2 * n inside int64 for any realistic n
            if self.p >= 2**26:
                raise ValueError("prime too large for the int64 F_p path")
        elif self.p:
            raise ValueError("p only makes sense for Fp")

    @classmethod
    def integers(cls):
        return cls("Z")

    @classmethod
    def rationals(cls):
        return cls("Q")

    @classmethod
    def prime_field(cls, p: int):
        return cls("Fp", int(p))

    @classmethod
    def from_characteristic(cls, p: int):
        return cls("Q") if p == 0 else cls("Fp", int(p))

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "Fp" else 0

    def __str__(self):
        return {"Z": "Z", "Q": "Q"}.get(self.kind, f"F_{self.p}")

    # -- element handling ---------------------------------------------------

    @property
    def dtype(self):
        return np.int64 if self.kind == "Fp" else object

    def scalar(self, x):
        if self.kind == "Fp":
            return int(x) % self.p
        if self.kind == "Q":
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return int(x.numerator)
        return int(x)

    def asarray(self, A, shape=None) -> np.ndarray:
        """Copy ``A`` (ints, Fractions, nested lists) into this ring."""
        if isinstance(A, np.ndarray) and A.dtype != object and self.kind == "Fp":
            out = np.asarray(A, dtype=np.int64) % self.p
            return out if shape is None else out.reshape(shape)
        arr = np.asarray(A, dtype=object)
        if shape is not None:
            arr = arr.reshape(shape)
        if self.kind == "Fp":
            flat = [int(x) % self.p if not isinstance(x, Fraction) else self._frac_mod(x) for x in arr.ravel()]
            return np.array(flat, dtype=np.int64).reshape(arr.shape)
        out = np.empty(arr.shape, dtype=object)
        flat = out.ravel() if out.size else out.reshape(-1)
        for i, x in enumerate(arr.ravel()):
            flat[i] = self.scalar(x)
        return out

    def _frac_mod(self, x: Fraction) -> int:
        den = x.denominator % self.p
        if den == 0:
            raise ZeroDivisionError(f"{x} has no image in F_{self.p}")
        return x.numerator * pow(den, -1, self.p) % self.p

    def zeros(self, rows: int, cols: int | None = None) -> np.ndarray:
        shape = (rows,) if cols is None else (rows, cols)
        if self.kind == "Fp":
            return np.zeros(shape, dtype=np.int64)
        out = np.empty(shape, dtype=object)
        out[...] = Fraction(0) if self.kind == "Q" else 0
        return out

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros(n, n)
        for i in range(n):
            out[i, i] = self.scalar(1)
        return out

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if A.shape[-1] != B.shape[0]:
            raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
        if self.kind == "Fp":
            return (A @ B) % self.p
        if A.shape[-1] == 0:
            rows = A.shape[0] if A.ndim == 2 else None
            cols = B.shape[1] if B.ndim == 2 else None
            if rows is None and cols is None:
                return self.scalar(0)
            if rows is None:
                return self.zeros(cols)
            if cols is None:
                return self.zeros(rows)
            return self.zeros(rows, cols)
        return A.dot(B)

    def reduce(self, A: np.ndarray) -> np.ndarray:
        return A % self.p if self.kind == "Fp" else A

    def add(self, A, B):
        return self.reduce(A + B)

    def sub(self, A, B):
        return self.reduce(A - B)

    def neg(self, A):
        return self.reduce(-A)

    def is_zero(self, A) -> bool:
        A = np.asarray(A)
        if A.size == 0:
            return True
        if self.kind == "Fp":
            return not np.any(A % self.p)
        return all(x == 0 for x in A.ravel())

    def inv(self, x):
        if self.kind == "Fp":
            return pow(int(x), -1, self.p)
        if self.kind == "Q":
            return 1 / Fraction(x)
        if x in (1, -1):
            return int(x)
        raise ZeroDivisionError(f"{x} is not a unit in Z")

    def to_python(self, x):
        """Plain int or Fraction for reports."""
        if isinstance(x, Fraction):
            return x if x.denominator != 1 else int(x.numerator)
        return int(x)


QQ = Coefficients("Q")
ZZ = Coefficients("Z")


def GF(p: int) -> Coefficients:
    return Coefficients("Fp", p)


# -- field linear algebra ----------------------------------------------------


def _require_field(coeff: Coefficients):
    if not coeff.is_field:
        raise TypeError("integer coefficients: use smith_normal_form instead")


def rref(A: np.ndarray, coeff: Coefficients):
    """Reduced row echelon form and pivot column list."""
    _require_field(coeff)
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError("rref expects a matrix")
    if coeff.kind == "Fp":
        R, piv = _kernels.rref_mod_p(A, coeff.p)
        return R, [int(c) for c in piv]
    R = coeff.asarray(A)
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if R[i, c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        R[r] = R[r] / R[r, c]
        for i in range(rows):
            if i != r and R[i, c] != 0:
                R[i] = R[i] - R[i, c] * R[r]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A: np.ndarray, coeff: Coefficients) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(A, coeff)[1])


def nullspace(A: np.ndarray, coeff: Coefficients) -> np.ndarray:
    """Columns form a basis of ker A."""
    A = np.asarray(A)
    n = A.shape[1]
    if A.shape[0] == 0:
        return coeff.eye(n)
    R, piv = rref(A, coeff)
    free = [c for c in range(n) if c not in set(piv)]
    N = coeff.zeros(n, len(free))
    one = coeff.scalar(1)
    for k, f in enumerate(free):
        N[f, k] = one
        for r, pc in enumerate(piv):
            N[pc, k] = coeff.scalar(-R[r, f])
    return N


def column_basis(A: np.ndarray, coeff: Coefficients) -> np.ndarray:
    """An independent subset of the columns of A spanning its image."""
    A = coeff.asarray(A) if A.dtype != coeff.dtype else A
    if A.size == 0:
        return coeff.zeros(A.shape[0], 0)
    _, piv = rref(A, coeff)
    return A[:, piv]


def solve(A: np.ndarray, B: np.ndarray, coeff: Coefficients):
    """Some X with A X = B, or None.  B may be a vector."""
    vec = B.ndim == 1
    if vec:
        B = B.reshape(-1, 1)
    rows, n = A.shape
    k = B.shape[1]
    if rows == 0:
        X = coeff.zeros(n, k)
        return X[:, 0] if vec else X
    if coeff.kind == "Fp":
        M = np.concatenate([coeff.asarray(A), coeff.asarray(B)], axis=1)
    else:
        M = np.concatenate([A.astype(object), B.astype(object)], axis=1)
    R, piv = rref(M, coeff)
    if any(c >= n for c in piv):
        return None
    X = coeff.zeros(n, k)
    for r, pc in enumerate(piv):
        X[pc] = R[r, n:]
    return X[:, 0] if vec else X


def inverse(A: np.ndarray, coeff: Coefficients) -> np.ndarray:
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    X = solve(A, coeff.eye(n), coeff)
    if X is None or rank(A, coeff) != n:
        raise ZeroDivisionError("singular matrix")
    return X


def extend_basis(sub: np.ndarray, full: np.ndarray, coeff: Coefficients) -> np.ndarray:
    """Columns of ``full`` completing the independent columns ``sub`` to a
    basis of span(sub) + span(full).  Returns only the new columns."""
    if full.shape[1] == 0:
        return coeff.zeros(full.shape[0], 0)
    M = np.concatenate([sub, full], axis=1)
    _, piv = rref(M, coeff)
    s = sub.shape[1]
    return full[:, [c - s for c in piv if c >= s]]


def in_span(basis: np.ndarray, x: np.ndarray, coeff: Coefficients) -> bool:
    if coeff.is_zero(x):
        return True
    if basis.shape[1] == 0:
        return False
    return solve(basis, x, coeff) is not None


def span_equal(A: np.ndarray, B: np.ndarray, coeff: Coefficients) -> bool:
    ra, rb = rank(A, coeff), rank(B, coeff)
    if ra != rb:
        return False
    if ra == 0:
        return True
    return rank(np.concatenate([A, B], axis=1), coeff) == ra


def intersect(A: np.ndarray, B: np.ndarray, coeff: Coefficients) -> np.ndarray:
    """Basis of span(A) ∩ span(B) (columns)."""
    n = A.shape[0]
    if A.shape[1] == 0 or B.shape[1] == 0:
        return coeff.zeros(n, 0)
    N = nullspace(np.concatenate([A, coeff.neg(B)], axis=1), coeff)
    if N.shape[1] == 0:
        return coeff.zeros(n, 0)
    return column_basis(coeff.matmul(A, N[: A.shape[1]]), coeff)


@dataclass(frozen=True)
class KernelImage:
    rank: int
    nullity: int
    kernel: np.ndarray
    image: np.ndarray


def kernel_image_ranks(A: np.ndarray, coeff: Coefficients) -> KernelImage:
    """Rank, nullity and exact bases; both bases are checked before returning."""
    _require_field(coeff)
    A = coeff.asarray(A)
    K = nullspace(A, coeff)
    I = column_basis(A, coeff)
    r = I.shape[1]
    if not coeff.is_zero(coeff.matmul(A, K)) or rank(K, coeff) != K.shape[1]:
        raise ArithmeticError("kernel basis failed verification")
    if r + K.shape[1] != A.shape[1]:
        raise ArithmeticError("rank-nullity failed")
    return KernelImage(r, K.shape[1], K, I)


# -- integers -----------------------------------------------------------------


@dataclass(frozen=True)
class SmithDecomposition:
    U: np.ndarray
    D: np.ndarray
    V: np.ndarray

    @property
    def diagonal(self) -> list[int]:
        k = min(self.D.shape) if self.D.size else 0
        return [int(self.D[i, i]) for i in range(k)]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)

    @property
    def invariant_factors(self) -> list[int]:
        return [x for x in self.diagonal if x != 0]


def _int_matrix(A) -> np.ndarray:
    return ZZ.asarray(A)


def _int_eye(n: int) -> np.ndarray:
    return ZZ.eye(n)


def smith_normal_form(A) -> SmithDecomposition:
    """U A V = D with D diagonal, d_1 | d_2 | ..., d_i >= 0.

    Pivot rule: the nonzero entry of least absolute value in the remaining
    block (first in row-major order on ties).
    """
    D = _int_matrix(A)
    if D.ndim != 2:
        raise ValueError("smith_normal_form expects a matrix")
    m, n = D.shape
    U = _int_eye(m)
    V = _int_eye(n)
    t = 0
    while t < min(m, n):
        block = [(abs(D[i, j]), i, j) for i in range(t, m) for j in range(t, n) if D[i, j] != 0]
        if not block:
            break
        _, pi, pj = min(block)
        D[[t, pi]] = D[[pi, t]]
        U[[t, pi]] = U[[pi, t]]
        D[:, [t, pj]] = D[:, [pj, t]]
        V[:, [t, pj]] = V[:, [pj, t]]
        done = False
        while not done:
            done = True
            a = D[t, t]
            for i in range(t + 1, m):
                if D[i, t] != 0:
                    q = D[i, t] // a
                    D[i] = D[i] - q * D[t]
                    U[i] = U[i] - q * U[t]
            for j in range(t + 1, n):
                if D[t, j] != 0:
                    q = D[t, j] // a
                    D[:, j] = D[:, j] - q * D[:, t]
                    V[:, j] = V[:, j] - q * V[:, t]
            rest = [(abs(D[i, t]), i, t) for i in range(t + 1, m) if D[i, t] != 0]
            rest += [(abs(D[t, j]), t, j) for j in range(t + 1, n) if D[t, j] != 0]
            if rest:
                _, i, j = min(rest)
                if i != t:
                    D[[t, i]] = D[[i, t]]
                    U[[t, i]] = U[[i, t]]
                else:
                    D[:, [t, j]] = D[:, [j, t]]
                    V[:, [t, j]] = V[:, [j, t]]
                done = False
                continue
            # row and column cleared; enforce divisibility on the remaining block
            a = D[t, t]
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i, j] % a != 0), None)
            if bad is not None:
                i, _ = bad
                D[t] = D[t] + D[i]
                U[t] = U[t] + U[i]
                done = False
        if D[t, t] < 0:
            D[t] = -D[t]
            U[t] = -U[t]
        t += 1
    return SmithDecomposition(U, D, V)


def int_det(A) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    M = _int_matrix(A)
    n = M.shape[0]
    if n == 0:
        return 1
    sign = 1
    prev = 1
    M = M.copy()
    for k in range(n - 1):
        if M[k, k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i, k] != 0), None)
            if swap is None:
                return 0
            M[[k, swap]] = M[[swap, k]]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i, j] = (M[i, j] * M[k, k] - M[i, k] * M[k, j]) // prev
        prev = M[k, k]
    return sign * int(M[n - 1, n - 1])


def int_inverse(A) -> np.ndarray:
    """Inverse of a unimodular integer matrix."""
    X = inverse(QQ.asarray(A), QQ)
    out = ZZ.zeros(*X.shape)
    for idx, x in np.ndenumerate(X):
        if x.denominator != 1:
            raise ValueError("matrix is not unimodular")
        out[idx] = int(x)
    return out


@dataclass(frozen=True)
class GroupSummary:
    """Iso type of a finitely generated group (or vector space dimension)."""

    rank: int
    torsion: tuple[int, ...] = ()
    coeff: Coefficients = QQ

    @property
    def dimension(self) -> int:
        if self.coeff.is_field:
            return self.rank
        raise TypeError("integral group has no dimension")

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self):
        base = str(self.coeff)
        parts = []
        if self.rank:
            parts.append(base if self.rank == 1 else f"{base}^{self.rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_json(self):
        return {"rank": self.rank, "torsion": list(self.torsion)}


@dataclass(frozen=True)
class IntegralCohomology:
    """H = ker d_out / im d_in over Z with explicit generators.

    ``free`` columns generate a free complement; ``tors`` columns are the
    torsion generators of orders ``orders``.  ``coords`` writes a cocycle in
    these generators (free part exactly, torsion part modulo orders).
    """

    summary: GroupSummary
    free: np.ndarray
    tors: np.ndarray
    orders: tuple[int, ...]
    _kernel: np.ndarray = field(repr=False)
    _change: np.ndarray = field(repr=False)
    _split: int = field(repr=False)

    def coords(self, x) -> tuple[list[int], list[int]]:
        """(free coordinates, torsion coordinates mod orders) of a cocycle x."""
        x = _int_matrix(x).reshape(-1)
        # x = K y with K the kernel basis; solve over Q then check integrality
        y = solve(QQ.asarray(self._kernel), QQ.asarray(x), QQ)
        if y is None:
            raise ValueError("vector is not a cocycle")
        y = [int(c) for c in y]
        z = ZZ.matmul(self._change, np.array(y, dtype=object))
        t = self._split
        tc = [int(z[i]) % o for i, o in enumerate(self.orders)]
        fc = [int(c) for c in z[t:]]
        return fc, tc


def integral_cohomology(d_in, d_out, n: int) -> IntegralCohomology:
    """Cohomology at a term of rank n with incoming d_in (n x a) and outgoing d_out (b x n)."""
    d_in = _int_matrix(d_in).reshape(n, -1) if np.size(d_in) or n == 0 else ZZ.zeros(n, 0)
    d_out = _int_matrix(d_out).reshape(-1, n) if np.size(d_out) or n == 0 else ZZ.zeros(0, n)
    if d_in.shape[1] and d_out.shape[0] and not ZZ.is_zero(ZZ.matmul(d_out, d_in)):
        raise MalformedComplexError("d_out . d_in != 0")
    S = smith_normal_form(d_out) if d_out.shape[0] else SmithDecomposition(ZZ.zeros(0, 0), ZZ.zeros(0, n), _int_eye(n))
    r = S.rank
    K = S.V[:, r:]  # kernel basis, saturated since V is unimodular
    Vinv = int_inverse(S.V)
    X = ZZ.matmul(Vinv, d_in)[r:] if d_in.shape[1] else ZZ.zeros(n - r, 0)
    k = n - r
    if X.shape[1] == 0 or k == 0:
        S2U, diag = _int_eye(k), []
    else:
        S2 = smith_normal_form(X)
        S2U, diag = S2.U, S2.invariant_factors
    # new basis of ker: columns of K U^{-1}; coordinates transform by U
    Uinv = int_inverse(S2U) if k else S2U
    G = ZZ.matmul(K, Uinv) if k else ZZ.zeros(n, 0)
    units = sum(1 for a in diag if a == 1)
    orders = tuple(int(a) for a in diag if a != 1)
    tors_cols = list(range(units, units + len(orders)))
    free_cols = list(range(len(diag), k))
    summary = GroupSummary(len(free_cols), orders, ZZ)
    # coords: y (K-coords) -> U y; torsion entries at units.., free after len(diag)
    change = S2U[units:] if k else ZZ.zeros(0, 0)
    return IntegralCohomology(
        summary,
        G[:, free_cols] if free_cols else ZZ.zeros(n, 0),
        G[:, tors_cols] if tors_cols else ZZ.zeros(n, 0),
        orders,
        K,
        change,
        len(orders),
    )


def cohomology_of_pair(d_in, d_out, coeff: Coefficients, n: int | None = None) -> GroupSummary:
    """Iso type of ker d_out / im d_in.

    ``n`` is the rank of the middle term; it is inferred from the shapes
    when those are non-degenerate.
    """
    d_in = np.asarray(d_in, dtype=object) if not isinstance(d_in, np.ndarray) else d_in
    d_out = np.asarray(d_out, dtype=object) if not isinstance(d_out, np.ndarray) else d_out
    if n is None:
        if d_in.ndim == 2 and d_in.shape[0]:
            n = d_in.shape[0]
        elif d_out.ndim == 2:
            n = d_out.shape[1]
        else:
            raise ValueError("cannot infer the middle dimension")
    d_in = d_in.reshape(n, -1) if d_in.size else (ZZ.zeros(n, 0) if d_in.ndim < 2 or d_in.shape[0] != n else d_in)
    d_out = d_out.reshape(-1, n) if d_out.size else (ZZ.zeros(0, n) if d_out.ndim < 2 or d_out.shape[1] != n else d_out)
    if not coeff.is_field:
        return integral_cohomology(d_in, d_out, n).summary
    A = coeff.asarray(d_in)
    B = coeff.asarray(d_out)
    if A.shape[1] and B.shape[0] and not coeff.is_zero(coeff.matmul(B, A)):
        raise MalformedComplexError("d_out . d_in != 0")
    nullity = n - rank(B, coeff)
    return GroupSummary(nullity - rank(A, coeff), (), coeff)


# -- graded bookkeeping ------------------------------------------------------


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def offset_of(q) -> Fraction:
    """Fractional part in [0, 1)."""
    q = frac(q)
    return q - (q.numerator // q.denominator)


@dataclass(frozen=True)
class GradedSpace:
    """Finitely supported graded dimension count with degrees in offset + Z."""

    offset: Fraction
    dims: Mapping[int, int]

    def __post_init__(self):
        off = frac(self.offset)
        if not 0 <= off < 1:
            raise ValueError("offset must lie in [0, 1)")
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "dims", {int(k): int(v) for k, v in sorted(self.dims.items()) if v})

    @classmethod
    def from_degrees(cls, offset, pairs: Iterable[tuple[Fraction, int]]):
        off = frac(offset)
        dims = {}
        for q, dim in pairs:
            q = frac(q)
            k = q - off
            if k.denominator != 1:
                raise ValueError(f"degree {q} not in {off} + Z")
            if dim:
                dims[int(k)] = dims.get(int(k), 0) + dim
        return cls(off, dims)

    def level(self, q) -> int:
        k = frac(q) - self.offset
        if k.denominator != 1:
            raise ValueError(f"degree {q} not in {self.offset} + Z")
        return int(k)

    def dim(self, q) -> int:
        return self.dims.get(self.level(q), 0)

    def degrees(self) -> list[Fraction]:
        return [self.offset + k for k in self.dims]

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    def __eq__(self, other):
        if not isinstance(other, GradedSpace):
            return NotImplemented
        return self.offset == other.offset and dict(self.dims) == dict(other.dims)

    def __hash__(self):
        return hash((self.offset, tuple(self.dims.items())))

    def __str__(self):
        if not self.dims:
            return "0"
        return ", ".join(f"{fmt(self.offset + k)}:{v}" for k, v in self.dims.items())


def fmt(x) -> str:
    """p/q text for an exact scalar."""
    x = frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

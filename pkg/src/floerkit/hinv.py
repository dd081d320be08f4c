"""h-invariant arithmetic: additivity, the definite-bounding inequality, lens
spaces and characteristic-vector searches."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from floerkit import _kernels
from floerkit.exactalg import fmt, frac, int_det


@dataclass(frozen=True)
class BoundarySpec:
    """Boundary components with their h-values and the candidate form of W."""

    components: tuple[tuple[str, Fraction], ...]
    b2: int
    sigma: int
    c1sq: Fraction
    chambers: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        comps = tuple((str(n), frac(h)) for n, h in self.components)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "c1sq", frac(self.c1sq))
        if self.b2 < 0:
            raise ValueError("b2 must be non-negative")
        if self.chambers is not None:
            object.__setattr__(self, "chambers", tuple(frac(m) for m in self.chambers))

    @property
    def negative_definite(self) -> bool:
        return self.sigma == -self.b2


@dataclass(frozen=True)
class FroyshovResult:
    lhs: Fraction
    rhs: Fraction
    satisfied: bool
    equality: bool
    negative_definite: bool

    def to_json(self):
        return {
            "lhs": fmt(self.lhs),
            "rhs": fmt(self.rhs),
            "satisfied": self.satisfied,
            "equality": self.equality,
            "negative_definite": self.negative_definite,
        }


def froyshov_check(B: BoundarySpec) -> FroyshovResult:
    """-sum h(Y_j) >= (b2 + c1^2) / 8 for a negative definite W.

    For forms that are not negative definite the inequality is still
    evaluated but carries no implication; the flag says which case applies.
    """
    lhs = -sum((h for _, h in B.components), Fraction(0))
    rhs = (B.b2 + B.c1sq) / 8
    return FroyshovResult(lhs, rhs, lhs >= rhs, lhs == rhs, B.negative_definite)


@dataclass(frozen=True)
class ChamberFormResult:
    lhs: Fraction
    rhs: Fraction
    applies: bool
    satisfied: bool | None


def chamber_form_check(zeta1: int, chambers: Sequence, c1sq, sigma: int) -> ChamberFormResult:
    """zeta(Y_1, m_1) >= sum m_j + (c1^2 - sigma)/8, when the right side is positive."""
    rhs = sum((frac(m) for m in chambers), Fraction(0)) + (frac(c1sq) - sigma) / 8
    applies = rhs > 0
    return ChamberFormResult(Fraction(zeta1), rhs, applies, (zeta1 >= rhs) if applies else None)


def lens_h(q: int, j: int) -> Fraction:
    return (Fraction((q - 2 * j) ** 2, q) - 1) / 8


def lens_h_table(q: int) -> list[Fraction]:
    """h(L(q,1), s_j) for j = 0..q-1."""
    if q < 2:
        raise ValueError("q must be at least 2")
    return [lens_h(q, j) for j in range(q)]


def h_to_d(h) -> Fraction:
    """Correction term in the convention where h = -d/2."""
    return -2 * frac(h)


def d_to_h(d) -> Fraction:
    return -frac(d) / 2


def additivity_check(h1, h2, h12) -> bool:
    return frac(h12) == frac(h1) + frac(h2)


# -- characteristic vectors ------------------------------------------------------------


@dataclass(frozen=True)
class DiagonalLattice:
    """The negative definite diagonal form <-1>^n."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")

    @property
    def gram(self) -> np.ndarray:
        return -np.eye(self.n, dtype=np.int64)


E8_GRAM = np.array(
    [
        [2, -1, 0, 0, 0, 0, 0, 0],
        [-1, 2, -1, 0, 0, 0, 0, 0],
        [0, -1, 2, -1, 0, 0, 0, -1],
        [0, 0, -1, 2, -1, 0, 0, 0],
        [0, 0, 0, -1, 2, -1, 0, 0],
        [0, 0, 0, 0, -1, 2, -1, 0],
        [0, 0, 0, 0, 0, -1, 2, 0],
        [0, 0, -1, 0, 0, 0, 0, 2],
    ],
    dtype=np.int64,
)
"""Positive definite E8 Cartan matrix; the negative definite form is -E8_GRAM."""


@dataclass(frozen=True)
class CharResult:
    value: Fraction
    vector: tuple[int, ...]
    exhaustive: bool
    bound: int


class LatticeError(ValueError):
    pass


def _negative_definite(Q: np.ndarray) -> bool:
    """Sylvester: leading minors of -Q all positive."""
    n = Q.shape[0]
    M = [[-int(x) for x in row] for row in Q.tolist()]
    for k in range(1, n + 1):
        if int_det(np.array([row[:k] for row in M[:k]], dtype=object)) <= 0:
            return False
    return True


def char_vector_max(L, bound: int | None = None, use_numba: bool | None = None) -> CharResult:
    """max over characteristic c of (n + c.c)/8 for a negative definite form.

    For <-1>^n the search is over {+1, -1}^n, which is optimal since larger
    odd entries only make c.c more negative.  For a general Gram matrix the
    search runs over the box |c_i| <= bound (default 5), which is a
    heuristic: a warning is issued.
    """
    if isinstance(L, DiagonalLattice):
        Q = L.gram
        bound = 1 if bound is None else bound
        val, vec = _kernels.char_search(Q, bound, odd_only=True, use_numba=use_numba)
        exhaustive = True
    else:
        Q = np.asarray(L, dtype=np.int64)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or not np.array_equal(Q, Q.T):
            raise LatticeError("Gram matrix must be square and symmetric")
        if not _negative_definite(Q):
            raise LatticeError("Gram matrix is not negative definite")
        bound = 5 if bound is None else bound
        warnings.warn(f"characteristic search limited to |c_i| <= {bound}; heuristic for non-diagonal forms", stacklevel=2)
        val, vec = _kernels.char_search(Q, bound, odd_only=False, use_numba=use_numba)
        exhaustive = False
    if val is None:
        raise LatticeError("no characteristic vector in the search box")
    n = Q.shape[0]
    return CharResult(Fraction(n + val, 8), tuple(int(x) for x in vec), exhaustive, bound)


def negative_definite_e8() -> np.ndarray:
    return -E8_GRAM


# -- counterexamples --------------------------------------------------------------------------


@dataclass(frozen=True)
class LensCounterexample:
    """Negative definite cobordism S^3 -> L(q,1) with h(S^3) < h(L(q,1), s_j).

    W is the disk bundle of Euler number -q with a ball removed (b2 = 1);
    the spin^c structure restricting to s_j has c1^2 = -(q-2j)^2/q.
    """

    q: int
    j: int
    h_source: Fraction
    h_target: Fraction
    c1sq: Fraction

    @property
    def violates_monotonicity(self) -> bool:
        return self.h_source < self.h_target

    def boundary_spec(self) -> BoundarySpec:
        # boundary (-S^3) u L(q,1); h(-S^3) = 0
        return BoundarySpec((("-S3", -self.h_source), (f"L({self.q},1)", self.h_target)), 1, -1, self.c1sq)


def lens_counterexamples(q_max: int = 8) -> list[LensCounterexample]:
    """All (q, j) with q <= q_max where h(Y1) >= h(Y2) fails for a negative definite W."""
    out = []
    for q in range(2, q_max + 1):
        for j, h in enumerate(lens_h_table(q)):
            if h > 0:
                out.append(LensCounterexample(q, j, Fraction(0), h, -Fraction((q - 2 * j) ** 2, q)))
    return out

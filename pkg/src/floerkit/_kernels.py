"""Hot loops: row reduction over F_p and characteristic-vector enumeration.

Each kernel has a numba version and a plain numpy version with identical
results.  Setting FLOERKIT_DISABLE_NUMBA=1 before import selects the numpy
path everywhere (useful for debugging and for the benchmark comparison).
"""

from __future__ import annotations

import itertools
import os

import numpy as np

DISABLE_NUMBA = os.environ.get("FLOERKIT_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    if DISABLE_NUMBA:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised through the env flag
    HAVE_NUMBA = False


# -- F_p reduced row echelon form ------------------------------------------


def _rref_mod_p_numpy(A: np.ndarray, p: int):
    A = A.copy() % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = (A[r] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            A[hit] = (A[hit] - np.outer(col[hit], A[r])) % p
        pivots.append(c)
        r += 1
    return A, np.array(pivots, dtype=np.int64)


def _char_search_numpy(Q: np.ndarray, bound: int, odd_only: bool):
    """Maximise c.Q.c over characteristic c in the box |c_i| <= bound."""
    n = Q.shape[0]
    if odd_only:
        vals = np.arange(-bound, bound + 1)
        vals = vals[vals % 2 != 0]
    else:
        vals = np.arange(-bound, bound + 1)
    diag_par = np.diag(Q) % 2
    best = None
    best_c = np.zeros(n, dtype=np.int64)
    # vectorise over the last k coordinates, loop over the rest
    k = min(n, 6)
    tail = np.array(list(itertools.product(vals, repeat=k)), dtype=np.int64).reshape(-1, k)
    for head in itertools.product(vals, repeat=n - k):
        c = np.empty((tail.shape[0], n), dtype=np.int64)
        c[:, : n - k] = head
        c[:, n - k :] = tail
        Qc = c @ Q
        ok = np.all((Qc - diag_par) % 2 == 0, axis=1)
        if not ok.any():
            continue
        norms = np.einsum("ij,ij->i", Qc[ok], c[ok])
        j = int(np.argmax(norms))
        if best is None or norms[j] > best:
            best = int(norms[j])
            best_c = c[ok][j].copy()
    return best, best_c


if HAVE_NUMBA:

    @njit(cache=True)
    def _modinv(a, p):
        t, newt = 0, 1
        r, newr = p, a % p
        while newr != 0:
            q = r // newr
            t, newt = newt, t - q * newt
            r, newr = newr, r - q * newr
        if t < 0:
            t += p
        return t

    @njit(cache=True)
    def _rref_mod_p_numba(A, p):
        rows, cols = A.shape
        for i in range(rows):
            for j in range(cols):
                A[i, j] = A[i, j] % p
        pivots = np.empty(min(rows, cols), dtype=np.int64)
        r = 0
        for c in range(cols):
            if r == rows:
                break
            piv = -1
            for i in range(r, rows):
                if A[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(cols):
                    tmp = A[r, j]
                    A[r, j] = A[piv, j]
                    A[piv, j] = tmp
            inv = _modinv(A[r, c], p)
            for j in range(cols):
                A[r, j] = (A[r, j] * inv) % p
            for i in range(rows):
                if i != r and A[i, c] != 0:
                    f = A[i, c]
                    for j in range(cols):
                        A[i, j] = (A[i, j] - f * A[r, j]) % p
            pivots[r] = c
            r += 1
        return A, pivots[:r]

    @njit(cache=True)
    def _char_search_numba(Q, bound, odd_only):
        n = Q.shape[0]
        step = 2 if odd_only else 1
        lo = -bound
        if odd_only and lo % 2 == 0:
            lo += 1
        hi = lo
        while hi + step <= bound:
            hi += step
        c = np.full(n, lo, dtype=np.int64)
        Qc = np.zeros(n, dtype=np.int64)
        for i in range(n):
            for j in range(n):
                Qc[i] += Q[i, j] * c[j]
        norm = 0
        for i in range(n):
            norm += c[i] * Qc[i]
        # bad counts coordinates where (Qc)_j and Q_jj disagree mod 2
        bad = 0
        for j in range(n):
            if (Qc[j] - Q[j, j]) % 2 != 0:
                bad += 1
        best = np.int64(0)
        found = False
        best_c = c.copy()
        while True:
            if bad == 0 and (not found or norm > best):
                best = norm
                found = True
                best_c[:] = c
            i = 0
            while i < n:
                if c[i] + step <= hi:
                    delta = step
                else:
                    delta = lo - c[i]
                norm += 2 * delta * Qc[i] + delta * delta * Q[i, i]
                c[i] += delta
                for j in range(n):
                    before = (Qc[j] - Q[j, j]) % 2 != 0
                    Qc[j] += delta * Q[j, i]
                    after = (Qc[j] - Q[j, j]) % 2 != 0
                    if before and not after:
                        bad -= 1
                    elif after and not before:
                        bad += 1
                if delta > 0:
                    break
                i += 1
            if i == n:
                break
        return found, best, best_c


def rref_mod_p(A: np.ndarray, p: int, use_numba: bool | None = None):
    """Row reduce an integer matrix over F_p.  Returns (R, pivot columns)."""
    A = np.ascontiguousarray(A, dtype=np.int64)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba and HAVE_NUMBA and A.size:
        R, piv = _rref_mod_p_numba(A.copy(), np.int64(p))
        return R, piv.copy()
    return _rref_mod_p_numpy(A, p)


def char_search(Q: np.ndarray, bound: int, odd_only: bool = False, use_numba: bool | None = None):
    """Best (max) value of c.Q.c over characteristic vectors in a box.

    Returns (value, vector), or (None, None) if the box contains no
    characteristic vector.
    """
    Q = np.ascontiguousarray(Q, dtype=np.int64)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba and HAVE_NUMBA:
        found, best, vec = _char_search_numba(Q, np.int64(bound), odd_only)
        if not found:
            return None, None
        return int(best), vec.copy()
    best, vec = _char_search_numpy(Q, bound, odd_only)
    if best is None:
        return None, None
    return best, vec

"""Compare the numba and numpy paths of the two hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from floerkit import _kernels
from floerkit.hinv import DiagonalLattice, negative_definite_e8


def best_of(fn, repeat):
    out = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        out = min(out, time.perf_counter() - t)
    return out


def cases():
    rng = np.random.default_rng(0)
    for n in (60, 150, 300):
        A = rng.integers(-50, 50, size=(n, n))
        yield f"rref mod 3, {n}x{n}", lambda A=A: _kernels.rref_mod_p(A, 3, use_numba=True), lambda A=A: _kernels.rref_mod_p(A, 3, use_numba=False)
    Q = DiagonalLattice(12).gram
    yield "char search <-1>^12", lambda: _kernels.char_search(Q, 1, True, use_numba=True), lambda: _kernels.char_search(Q, 1, True, use_numba=False)
    E = negative_definite_e8()
    yield "char search E8, |c|<=2", lambda: _kernels.char_search(E, 2, use_numba=True), lambda: _kernels.char_search(E, 2, use_numba=False)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable (or FLOERKIT_DISABLE_NUMBA set); nothing to compare")
        return
    print(f"{'case':28s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, fast, slow in cases():
        fast()  # compile
        a, b = best_of(fast, args.repeat), best_of(slow, args.repeat)
        print(f"{name:28s} {a * 1e3:9.2f}ms {b * 1e3:9.2f}ms {b / a:7.1f}x")


if __name__ == "__main__":
    main()

import os
import subprocess
import sys

import numpy as np
import pytest

from floerkit import _kernels
from floerkit.exactalg import GF, rank
from floerkit.hinv import DiagonalLattice, char_vector_max, negative_definite_e8

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable")


@needs_numba
@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_rref_paths_agree(p):
    rng = np.random.default_rng(p)
    for _ in range(40):
        r, c = rng.integers(1, 9, size=2)
        A = rng.integers(-20, 20, size=(r, c))
        R1, piv1 = _kernels.rref_mod_p(A, p, use_numba=True)
        R2, piv2 = _kernels.rref_mod_p(A, p, use_numba=False)
        assert np.array_equal(R1, R2) and np.array_equal(piv1, piv2)
        assert len(piv1) == rank(GF(p).asarray(A.tolist()), GF(p))


def test_rref_empty():
    R, piv = _kernels.rref_mod_p(np.zeros((0, 3), dtype=np.int64), 3)
    assert R.shape == (0, 3) and piv.size == 0


@needs_numba
def test_char_search_paths_agree():
    for n in (1, 3, 6):
        a = _kernels.char_search(DiagonalLattice(n).gram, 1, odd_only=True, use_numba=True)
        b = _kernels.char_search(DiagonalLattice(n).gram, 1, odd_only=True, use_numba=False)
        assert a[0] == b[0] == -n
    Q = np.array([[-2, 1, 0], [1, -3, 1], [0, 1, -2]])
    a = _kernels.char_search(Q, 3, use_numba=True)
    b = _kernels.char_search(Q, 3, use_numba=False)
    assert a[0] == b[0]
    for c in (a[1], b[1]):
        assert int(c @ Q @ c) == a[0]
        assert np.all((c @ Q - np.diag(Q)) % 2 == 0)


@needs_numba
@pytest.mark.filterwarnings("ignore:characteristic search")
def test_e8_paths_agree():
    E = negative_definite_e8()
    assert char_vector_max(E, bound=2, use_numba=True).value == char_vector_max(E, bound=2, use_numba=False).value == 1


def test_env_flag_disables_numba():
    env = dict(os.environ, FLOERKIT_DISABLE_NUMBA="1")
    code = "from floerkit import _kernels; print(_kernels.HAVE_NUMBA, _kernels.DISABLE_NUMBA)"
    r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.split() == ["False", "True"]
    code = "from floerkit.cli import run; raise SystemExit(run(['hinv', 'poincare']))"
    assert subprocess.run([sys.executable, "-c", code], env=env, capture_output=True).returncode == 0

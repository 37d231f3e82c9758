import os
import subprocess
import sys

import numpy as np
import pytest

from wdirichlet import _kernels

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not importable")


def random_table(M, density, seed):
    rng = np.random.default_rng(seed)
    A = np.zeros((M, M), dtype=np.complex128)
    mask = rng.random((M, M)) < density
    A[mask] = rng.normal(size=mask.sum()) + 1j * rng.normal(size=mask.sum())
    A[0, 0] = 2 + rng.random()
    return A


@pytest.mark.parametrize("M,seed", [(1, 0), (7, 1), (32, 2), (64, 3)])
def test_convolve_backends_agree(M, seed):
    A, B = random_table(M, 0.2, seed), random_table(M, 0.2, seed + 100)
    assert np.allclose(_kernels.convolve_numba(A, B), _kernels.convolve_numpy(A, B), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("M,seed", [(1, 0), (7, 1), (32, 2), (64, 3)])
def test_invert_backends_agree_and_invert(M, seed):
    A = random_table(M, 0.05, seed) / M
    A[0, 0] = 1.5
    B1, B2 = _kernels.invert_numba(A), _kernels.invert_numpy(A)
    assert np.allclose(B1, B2, rtol=1e-10, atol=1e-12)
    delta = np.zeros((M, M), dtype=np.complex128)
    delta[0, 0] = 1
    assert np.allclose(_kernels.convolve_numba(A, B1), delta, atol=1e-10)


def test_eval_backends_agree():
    rng = np.random.default_rng(5)
    logm, logn = np.log(rng.integers(1, 100, 30)), np.log(rng.integers(1, 100, 30))
    coef = rng.normal(size=30) + 1j * rng.normal(size=30)
    s1 = rng.random(50) + 1j * rng.normal(size=50)
    s2 = rng.random(50) + 1j * rng.normal(size=50)
    a = _kernels.eval_points_numba(logm, logn, coef, s1, s2)
    b = _kernels.eval_points_numpy(logm, logn, coef, s1, s2)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


def test_env_flag_selects_numpy():
    env = dict(os.environ, WDIRICHLET_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from wdirichlet import _kernels; print(_kernels.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"

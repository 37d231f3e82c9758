"""Dense float kernels on square boxes: convolution, formal inversion, evaluation.

Arrays are indexed ``A[m-1, n-1]``.  Each kernel has a numba version and a
pure-numpy version.  Set ``WDIRICHLET_NO_NUMBA=1`` to force numpy; numba is
also skipped silently when it cannot be imported.
"""

from __future__ import annotations

import os

import numpy as np

from .lattice import omega_table

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("WDIRICHLET_NO_NUMBA", "0") not in ("1", "true", "yes")

# ------------------------------------------------------------------ numpy


def convolve_numpy(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    M, N = A.shape
    C = np.zeros((M, N), dtype=np.complex128)
    for u, v in zip(*np.nonzero(A)):
        u1, v1 = u + 1, v + 1
        ku, kv = M // u1, N // v1
        C[u1 - 1 : u1 * ku : u1, v1 - 1 : v1 * kv : v1] += A[u, v] * B[:ku, :kv]
    return C


def invert_numpy(A: np.ndarray) -> np.ndarray:
    """Formal inverse on the box, one Omega(m)+Omega(n) layer at a time.

    Cells in a layer never depend on each other, so each layer is solved and
    pushed to its multiples in one vectorized step.
    """
    M, N = A.shape
    a00 = A[0, 0]
    om = omega_table(max(M, N))
    layer = om[1 : M + 1, None] + om[None, 1 : N + 1]
    acc = np.zeros((M, N), dtype=np.complex128)
    acc[0, 0] = -1.0
    B = np.zeros((M, N), dtype=np.complex128)
    gu, gv = np.nonzero(A)
    keep = (gu > 0) | (gv > 0)
    gu, gv = gu[keep] + 1, gv[keep] + 1
    gval = A[gu - 1, gv - 1]
    for L in range(int(layer.max()) + 1):
        mm, nn = np.nonzero(layer == L)
        vals = -acc[mm, nn] / a00
        B[mm, nn] = vals
        live = vals != 0
        mm, nn, vals = mm[live] + 1, nn[live] + 1, vals[live]
        for u, v, g in zip(gu, gv, gval):
            ok = (mm * u <= M) & (nn * v <= N)
            np.add.at(acc, (mm[ok] * u - 1, nn[ok] * v - 1), g * vals[ok])
    return B


def eval_points_numpy(logm, logn, coef, s1, s2, chunk: int = 4096) -> np.ndarray:
    out = np.empty(len(s1), dtype=np.complex128)
    for lo in range(0, len(s1), chunk):
        e = np.exp(-np.outer(s1[lo : lo + chunk], logm) - np.outer(s2[lo : lo + chunk], logn))
        out[lo : lo + chunk] = e @ coef
    return out


# ------------------------------------------------------------------ numba

if HAVE_NUMBA:

    @njit(cache=True)
    def convolve_numba(A, B):
        M, N = A.shape
        C = np.zeros((M, N), dtype=np.complex128)
        for u in range(1, M + 1):
            for v in range(1, N + 1):
                a = A[u - 1, v - 1]
                if a == 0:
                    continue
                for x in range(1, M // u + 1):
                    for y in range(1, N // v + 1):
                        C[u * x - 1, v * y - 1] += a * B[x - 1, y - 1]
        return C

    @njit(cache=True)
    def invert_numba(A):
        # push scheme in lexicographic order: every proper divisor pair of
        # (m, n) precedes it, so acc[m, n] is complete when (m, n) is reached
        M, N = A.shape
        a00 = A[0, 0]
        nz = 0
        gu = np.empty(M * N, dtype=np.int64)
        gv = np.empty(M * N, dtype=np.int64)
        for u in range(1, M + 1):
            for v in range(1, N + 1):
                if (u > 1 or v > 1) and A[u - 1, v - 1] != 0:
                    gu[nz] = u
                    gv[nz] = v
                    nz += 1
        acc = np.zeros((M, N), dtype=np.complex128)
        B = np.zeros((M, N), dtype=np.complex128)
        for m in range(1, M + 1):
            for n in range(1, N + 1):
                d = 1.0 if (m == 1 and n == 1) else 0.0
                val = (d - acc[m - 1, n - 1]) / a00
                B[m - 1, n - 1] = val
                if val == 0:
                    continue
                for k in range(nz):
                    tm = m * gu[k]
                    tn = n * gv[k]
                    if tm <= M and tn <= N:
                        acc[tm - 1, tn - 1] += A[gu[k] - 1, gv[k] - 1] * val
        return B

    @njit(cache=True)
    def eval_points_numba(logm, logn, coef, s1, s2):
        out = np.empty(len(s1), dtype=np.complex128)
        for k in range(len(s1)):
            acc = 0j
            for j in range(len(coef)):
                acc += coef[j] * np.exp(-s1[k] * logm[j] - s2[k] * logn[j])
            out[k] = acc
        return out


def dense_convolve(A, B):
    """Truncated product: C[x] = sum over u*v = x inside the box of A[u] B[v]."""
    A = np.ascontiguousarray(A, dtype=np.complex128)
    B = np.ascontiguousarray(B, dtype=np.complex128)
    if A.shape != B.shape:
        raise ValueError("dense_convolve needs equal shapes")
    return convolve_numba(A, B) if USE_NUMBA else convolve_numpy(A, B)


def dense_invert(A):
    A = np.ascontiguousarray(A, dtype=np.complex128)
    if A[0, 0] == 0:
        raise ZeroDivisionError("A[0, 0] == 0")
    return invert_numba(A) if USE_NUMBA else invert_numpy(A)


def eval_points(logm, logn, coef, s1, s2):
    args = [np.ascontiguousarray(x, dtype=t) for x, t in (
        (logm, np.float64), (logn, np.float64), (coef, np.complex128),
        (s1, np.complex128), (s2, np.complex128))]
    return eval_points_numba(*args) if USE_NUMBA else eval_points_numpy(*args)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"

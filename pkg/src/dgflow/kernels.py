"""Batched tensor-product contraction kernels.

These are the hot inner loops of every matrix-free operator application:
for a batch of cells, contract per-cell coefficient blocks with two 1D
basis/derivative tables (sum factorization, O(p^3) per cell instead of
O(p^4)).

Two interchangeable implementations exist: a numba-compiled one and a
pure-numpy one built on batched matmul.  Selection happens at import time
from the DGFLOW_NUMBA environment variable ("0"/"off" forces numpy,
"1"/"on" requires numba, unset prefers numba when importable).
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("DGFLOW_NUMBA", "").strip().lower()
if _env in ("0", "false", "off", "no"):
    _USE_NUMBA = False
elif _env in ("1", "true", "on", "yes"):
    _USE_NUMBA = True
else:
    try:
        import numba  # noqa: F401

        _USE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _USE_NUMBA = False


def tensor2d_numpy(A, B, C):
    """out[c,q,r] = sum_ij A[q,i] B[r,j] C[c,i,j] via two batched matmuls."""
    tmp = C @ B.T  # (nc, n1, q2)
    return A @ tmp  # broadcasts to (nc, q1, q2)


if _USE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _tensor2d_nb(A, B, C, out):
        nc = C.shape[0]
        q1, n1 = A.shape
        q2, n2 = B.shape
        tmp = np.empty((n1, q2))
        for c in range(nc):
            for i in range(n1):
                for r in range(q2):
                    s = 0.0
                    for j in range(n2):
                        s += B[r, j] * C[c, i, j]
                    tmp[i, r] = s
            for q in range(q1):
                for r in range(q2):
                    s = 0.0
                    for i in range(n1):
                        s += A[q, i] * tmp[i, r]
                    out[c, q, r] = s

    def tensor2d_numba(A, B, C):
        """Numba twin of tensor2d_numpy."""
        C = np.ascontiguousarray(C)
        A = np.ascontiguousarray(A)
        B = np.ascontiguousarray(B)
        out = np.empty((C.shape[0], A.shape[0], B.shape[0]))
        _tensor2d_nb(A, B, C, out)
        return out

    tensor2d = tensor2d_numba
else:
    tensor2d_numba = None
    tensor2d = tensor2d_numpy


def active_backend():
    """Name of the contraction backend selected at import time."""
    return "numba" if _USE_NUMBA else "numpy"

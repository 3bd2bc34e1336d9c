"""Forward DFT of power-of-two columns.

The transform is the unnormalized ``X_j = sum_k x_k exp(-2 pi i j k / m)``.
It runs as an iterative Stockham (self-sorting) Cooley-Tukey sweep: an outer
loop over stages and an inner loop over butterflies, radix-4 throughout plus a
single radix-2 stage when ``log2(m)`` is odd. Roots of unity come from one
read-only table per length.
"""

from functools import lru_cache

import numba as nb
import numpy as np

from ._parallel import resolve_workers, run_columns
from .errors import ContractViolation


def is_power_of_two(m):
    return m >= 1 and (m & (m - 1)) == 0


@lru_cache(maxsize=64)
def twiddle_table(m):
    """``exp(-2 pi i j / m)`` for ``j = 0..m-1``, shared and read-only."""
    if not is_power_of_two(m):
        raise ContractViolation(f"FFT length must be a power of two, got {m}")
    ang = -2.0 * np.pi * np.arange(m, dtype=np.float64) / m
    tw = np.empty(m, dtype=np.complex128)
    tw.real = np.cos(ang)
    tw.imag = np.sin(ang)
    tw.flags.writeable = False
    return tw


@nb.njit(nogil=True, cache=True)
def _stockham(x, y, tw):
    """Transform `x` in place using `y` as scratch. Both have length m."""
    m = x.shape[0]
    n = m
    s = 1
    src = x
    dst = y
    while n >= 4:
        q4 = n // 4
        step = m // n
        for p in range(q4):
            w1 = tw[p * step]
            w2 = tw[2 * p * step]
            w3 = tw[3 * p * step]
            for q in range(s):
                a = src[q + s * p]
                b = src[q + s * (p + q4)]
                c = src[q + s * (p + 2 * q4)]
                d = src[q + s * (p + 3 * q4)]
                apc = a + c
                amc = a - c
                bpd = b + d
                bmd = b - d
                # -i * (b - d)
                jbmd = complex(bmd.imag, -bmd.real)
                dst[q + s * (4 * p)] = apc + bpd
                dst[q + s * (4 * p + 1)] = w1 * (amc + jbmd)
                dst[q + s * (4 * p + 2)] = w2 * (apc - bpd)
                dst[q + s * (4 * p + 3)] = w3 * (amc - jbmd)
        n = q4
        s *= 4
        src, dst = dst, src
    if n == 2:
        for q in range(s):
            a = src[q]
            b = src[q + s]
            dst[q] = a + b
            dst[q + s] = a - b
        src, dst = dst, src
    if src is not x:
        for i in range(m):
            x[i] = src[i]


@nb.njit(nogil=True, cache=True)
def _fft_cols(a, tw, start, stop):
    m = a.shape[0]
    if m == 1:
        return
    x = np.empty(m, dtype=np.complex128)
    y = np.empty(m, dtype=np.complex128)
    for j in range(start, stop):
        for i in range(m):
            x[i] = a[i, j]
        _stockham(x, y, tw)
        for i in range(m):
            a[i, j] = x[i]


def _check_length(m, tw):
    if not is_power_of_two(m):
        raise ContractViolation(f"FFT length must be a power of two, got {m}")
    if tw is not None and tw.shape[0] != m:
        raise ContractViolation(f"twiddle table has length {tw.shape[0]}, column has {m}")


def fft_column(x, tw=None):
    """Replace the 1-D complex128 array `x` by its forward DFT, in place."""
    if not isinstance(x, np.ndarray) or x.dtype != np.complex128 or x.ndim != 1:
        raise ContractViolation("fft_column needs a 1-D complex128 ndarray")
    m = x.shape[0]
    _check_length(m, tw)
    if m == 1:
        return
    tw = twiddle_table(m) if tw is None else tw
    if x.flags.c_contiguous:
        _stockham(x, np.empty(m, dtype=np.complex128), tw)
    else:
        buf = np.ascontiguousarray(x)
        _stockham(buf, np.empty(m, dtype=np.complex128), tw)
        x[:] = buf


def fft_columns(a, workers=None):
    """Transform every column of the column-major matrix `a` in place."""
    if not isinstance(a, np.ndarray) or a.dtype != np.complex128 or a.ndim != 2 or not a.flags.f_contiguous:
        raise ContractViolation("fft_columns needs a 2-D column-major complex128 ndarray")
    m, n = a.shape
    _check_length(m, None)
    run_columns(_fft_cols, n, resolve_workers(workers), a, twiddle_table(m))


def dft_matrix(m):
    """The dense m x m DFT operator ``F[j, k] = exp(-2 pi i j k / m)``."""
    idx = np.arange(m)
    # reduce j*k mod m before scaling so the angle stays exact
    ang = -2.0 * np.pi * ((np.outer(idx, idx) % m) / m)
    return np.asfortranarray(np.cos(ang) + 1j * np.sin(ang))


def dft_oracle(x):
    """Direct O(m^2) evaluation of ``F @ x`` for any length."""
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    return dft_matrix(x.shape[0]) @ x

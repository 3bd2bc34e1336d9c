"""Dense complex matrices: construction, products, norms and file I/O.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128`` stored in
column-major (Fortran) order, so that every column is a contiguous block and
column-partitioned kernels touch disjoint memory.
"""

import math
import struct

import numba as nb
import numpy as np

from ._parallel import resolve_workers, run_columns
from .errors import ContractViolation
from .rng import TAG_GAUSSIAN, TAG_POWER, RngState, draw_u64, to_unit_open

MAGIC = b"RIDM"
_HEADER = struct.Struct("<4sQQ")


def as_matrix(a, name="matrix"):
    """Return `a` as a non-empty 2-D column-major complex128 array.

    No copy is made when `a` already satisfies the layout.
    """
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise ContractViolation(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractViolation(f"{name} must be non-empty, got shape {arr.shape}")
    return np.asfortranarray(arr, dtype=np.complex128)


def zeros(rows, cols):
    return np.zeros((rows, cols), dtype=np.complex128, order="F")


@nb.njit(nogil=True, cache=True)
def _matmul_cols(a, b, out, start, stop):
    m, p = a.shape
    for j in range(start, stop):
        for t in range(p):
            btj = b[t, j]
            for i in range(m):
                out[i, j] += a[i, t] * btj


@nb.njit(nogil=True, cache=True)
def _adjoint_matvec_cols(a, y, out, start, stop):
    m = a.shape[0]
    for j in range(start, stop):
        s = 0j
        for i in range(m):
            s += a[i, j].conjugate() * y[i]
        out[j] = s


def matmul(a, b, workers=None):
    """Product ``a @ b`` with a fixed summation order.

    Each output entry accumulates ``a[i, t] * b[t, j]`` for ascending ``t``
    starting from zero, and output columns are computed independently, so the
    result is bitwise identical for every worker count.
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ContractViolation(f"inner dimensions differ: {a.shape} @ {b.shape}")
    out = zeros(a.shape[0], b.shape[1])
    run_columns(_matmul_cols, b.shape[1], resolve_workers(workers), a, b, out)
    return out


def adjoint_matvec(a, y, workers=None):
    """``a^H y`` for a vector `y`, one independent dot product per column of `a`."""
    a = as_matrix(a, "a")
    y = np.ascontiguousarray(y, dtype=np.complex128).reshape(-1)
    if y.shape[0] != a.shape[0]:
        raise ContractViolation(f"vector length {y.shape[0]} != rows {a.shape[0]}")
    out = np.zeros(a.shape[1], dtype=np.complex128)
    run_columns(_adjoint_matvec_cols, a.shape[1], resolve_workers(workers), a, y, out)
    return out


def matvec(a, x, workers=None):
    x = np.asarray(x, dtype=np.complex128).reshape(-1, 1)
    return matmul(a, x, workers=workers)[:, 0]


def frobenius_norm(a):
    a = np.asarray(a, dtype=np.complex128)
    return float(np.sqrt(np.sum(a.real * a.real + a.imag * a.imag)))


def power_iteration(apply, apply_adjoint, n, max_iters=100, tol=1e-6, rng=None):
    """Largest singular value of a linear operator by power iteration on A^H A.

    Parameters
    ----------
    apply, apply_adjoint : callable
        ``x -> A x`` and ``y -> A^H y`` on 1-D complex arrays.
    n : int
        Number of columns of the operator.
    max_iters : int
        Iteration cap.
    tol : float
        Stop once successive estimates differ by less than ``tol`` relative.
    rng : RngState, optional
        Source of the start vector.

    Returns
    -------
    float
        The final estimate ``||A x||`` for the last unit iterate ``x``.
    """
    if max_iters < 1:
        raise ContractViolation("max_iters must be >= 1")
    if not tol > 0:
        raise ContractViolation("tol must be positive")
    rng = rng if rng is not None else RngState()
    x = gaussian_complex_matrix(n, 1, rng.derive(TAG_POWER), workers=1)[:, 0]
    x /= np.linalg.norm(x)
    prev = 0.0
    est = 0.0
    for _ in range(max_iters):
        y = apply(x)
        est = float(np.linalg.norm(y))
        if est == 0.0:
            return 0.0
        if prev > 0.0 and abs(est - prev) < tol * est:
            break
        prev = est
        z = apply_adjoint(y)
        nz = np.linalg.norm(z)
        if nz == 0.0:
            break
        x = z / nz
    return est


def spectral_norm_estimate(a, max_iters=100, tol=1e-6, rng=None, workers=None):
    """Estimate ``||a||_2`` by power iteration from a seeded random start."""
    a = as_matrix(a, "a")
    return power_iteration(
        lambda x: matvec(a, x, workers),
        lambda y: adjoint_matvec(a, y, workers),
        a.shape[1],
        max_iters=max_iters,
        tol=tol,
        rng=rng,
    )


@nb.njit(nogil=True, cache=True)
def _gaussian_cols(out, key, start, stop):
    rows = out.shape[0]
    two_pi = 2.0 * math.pi
    for j in range(start, stop):
        for i in range(rows):
            ctr = (np.uint64(i) << np.uint64(32)) | np.uint64(j)
            u1 = to_unit_open(draw_u64(key, ctr << np.uint64(1)))
            u2 = to_unit_open(draw_u64(key, (ctr << np.uint64(1)) | np.uint64(1)))
            # Box-Muller with variance 1/2 per component, E|z|^2 = 1
            r = math.sqrt(-math.log(u1))
            out[i, j] = complex(r * math.cos(two_pi * u2), r * math.sin(two_pi * u2))


def gaussian_complex_matrix(rows, cols, rng, workers=None):
    """Matrix of i.i.d. standard complex Gaussians (``E|z|^2 = 1``).

    Entry ``(i, j)`` depends only on ``(rng.seed, rng.stream, i, j)``.
    """
    if rows < 1 or cols < 1:
        raise ContractViolation(f"shape must be positive, got {rows}x{cols}")
    if rows >= 1 << 31 or cols >= 1 << 32:
        raise ContractViolation("matrix too large for the counter layout")
    out = zeros(rows, cols)
    run_columns(_gaussian_cols, cols, resolve_workers(workers), out, rng.key(TAG_GAUSSIAN))
    return out


def write_matrix(path, a):
    """Write `a` in the little-endian ``RIDM`` binary format."""
    a = as_matrix(a)
    rows, cols = a.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, rows, cols))
        fh.write(a.astype("<c16", copy=False).tobytes(order="F"))


def read_matrix(path):
    """Read a matrix written by :func:`write_matrix`."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ContractViolation(f"{path}: truncated header")
        magic, rows, cols = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ContractViolation(f"{path}: bad magic {magic!r}")
        if rows < 1 or cols < 1:
            raise ContractViolation(f"{path}: empty matrix {rows}x{cols}")
        payload = fh.read()
    if len(payload) != rows * cols * 16:
        raise ContractViolation(f"{path}: expected {rows * cols * 16} data bytes, found {len(payload)}")
    data = np.frombuffer(payload, dtype="<c16").reshape((rows, cols), order="F")
    return np.array(data, dtype=np.complex128, order="F")

"""Rank-k column-pivoted QR of the sketch by iterated classical Gram-Schmidt.

At step i the remaining column with the largest residual norm is chosen
(lowest index on ties). Its residual is re-projected against all earlier basis
vectors when cancellation has shrunk it below ``reorth_threshold`` times its
original norm, then normalized into ``q[:, i]``. Every still-active column then
has its ``q[:, i]`` component removed and recorded in ``r[i, :]``; that sweep
is what fills in the non-pivot block and runs column-parallel.
"""

import math
import time
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from ._parallel import resolve_workers, run_columns
from .errors import ContractViolation, RankDeficientSketch
from .matrix import as_matrix

RANK_TOL = 1e-13
REORTH_THRESHOLD = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class PivotedQr:
    """Q (l x k), R (k x n, original column order), pivots and residual norms.

    `update_seconds` is the wall time spent in the non-pivot projection
    sweeps, reported separately so callers can attribute it to the
    factorization of R.
    """

    q: np.ndarray
    r: np.ndarray
    pivots: np.ndarray
    resid_norms: np.ndarray
    reorth_steps: int = 0
    update_seconds: float = field(default=0.0, compare=False)

    @property
    def k(self):
        return self.q.shape[1]


@nb.njit(nogil=True, cache=True)
def _column_norms(w, norms, start, stop):
    l = w.shape[0]
    for j in range(start, stop):
        s = 0.0
        for t in range(l):
            v = w[t, j]
            s += v.real * v.real + v.imag * v.imag
        norms[j] = math.sqrt(s)


@nb.njit(nogil=True, cache=True)
def _project_out(w, q, i, r, active, norms, start, stop):
    # remove the q[:, i] component from every active column; refresh its norm
    l = w.shape[0]
    for j in range(start, stop):
        if not active[j]:
            continue
        c = 0j
        for t in range(l):
            c += q[t, i].conjugate() * w[t, j]
        r[i, j] = c
        s = 0.0
        for t in range(l):
            v = w[t, j] - q[t, i] * c
            w[t, j] = v
            s += v.real * v.real + v.imag * v.imag
        norms[j] = math.sqrt(s)


@nb.njit(nogil=True, cache=True)
def _accept_pivot(w, q, r, i, p, orig_norm, threshold):
    """Reorthogonalize column p if needed, normalize into q[:, i].

    Returns (final norm, reorthogonalized flag).
    """
    l = w.shape[0]
    s = 0.0
    for t in range(l):
        v = w[t, p]
        s += v.real * v.real + v.imag * v.imag
    nrm = math.sqrt(s)
    again = False
    if i > 0 and nrm < threshold * orig_norm:
        again = True
        h = np.empty(i, dtype=np.complex128)
        for c in range(i):
            acc = 0j
            for t in range(l):
                acc += q[t, c].conjugate() * w[t, p]
            h[c] = acc
        for t in range(l):
            v = w[t, p]
            for c in range(i):
                v -= q[t, c] * h[c]
            w[t, p] = v
        for c in range(i):
            r[c, p] += h[c]
        s = 0.0
        for t in range(l):
            v = w[t, p]
            s += v.real * v.real + v.imag * v.imag
        nrm = math.sqrt(s)
    if nrm > 0.0:
        inv = 1.0 / nrm
        for t in range(l):
            q[t, i] = w[t, p] * inv
    r[i, p] = nrm
    return nrm, again


def pivoted_gs_qr(y, k, workers=None, reorth_threshold=REORTH_THRESHOLD, rank_tol=RANK_TOL):
    """Truncated pivoted QR ``y[:, pivots] ~= q @ r[:, pivots]``.

    Parameters
    ----------
    y : array_like, shape (l, n)
        Matrix to factor; not modified.
    k : int
        Number of pivots, ``1 <= k <= min(l, n)``.
    workers : int, optional
        Threads for the per-column sweeps.
    reorth_threshold : float
        Re-project a candidate when its residual drops below this fraction
        of its original norm. 0 disables reorthogonalization.
    rank_tol : float
        Relative residual below which the sketch is declared rank deficient.

    Returns
    -------
    PivotedQr

    Raises
    ------
    RankDeficientSketch
        If a pivot's residual falls below ``rank_tol`` times the largest
        initial column norm before k pivots are found.
    """
    y = as_matrix(y, "y")
    l, n = y.shape
    if not 1 <= k <= min(l, n):
        raise ContractViolation(f"need 1 <= k <= min(l, n) = {min(l, n)}, got k={k}")
    workers = resolve_workers(workers)

    w = np.array(y, order="F", copy=True)
    q = np.zeros((l, k), dtype=np.complex128, order="F")
    r = np.zeros((k, n), dtype=np.complex128, order="F")
    norms = np.empty(n, dtype=np.float64)
    run_columns(_column_norms, n, workers, w, norms)
    orig = norms.copy()
    floor = rank_tol * float(orig.max())
    active = np.ones(n, dtype=np.bool_)
    pivots = np.empty(k, dtype=np.int64)
    resid = np.empty(k, dtype=np.float64)
    reorths = 0
    update_seconds = 0.0

    for i in range(k):
        cand = np.where(active, norms, -1.0)
        p = int(np.argmax(cand))
        resid[i] = cand[p]
        if not cand[p] > floor:
            raise RankDeficientSketch(i)
        nrm, again = _accept_pivot(w, q, r, i, p, orig[p], reorth_threshold)
        reorths += int(again)
        if not nrm > floor:
            raise RankDeficientSketch(i)
        pivots[i] = p
        active[p] = False
        t0 = time.perf_counter()
        run_columns(_project_out, n, workers, w, q, i, r, active, norms)
        update_seconds += time.perf_counter() - t0

    for arr in (q, r, pivots, resid):
        arr.flags.writeable = False
    return PivotedQr(q=q, r=r, pivots=pivots, resid_norms=resid, reorth_steps=reorths, update_seconds=update_seconds)


def triangular_blocks(f):
    """Split r into the pivot block r1 (k x k) and the rest r2 (k x (n-k)).

    Returns ``(r1, r2, nonpivot_cols)`` with r2's columns in ascending
    original order.
    """
    n = f.r.shape[1]
    mask = np.ones(n, dtype=bool)
    mask[f.pivots] = False
    nonpivot = np.flatnonzero(mask)
    r1 = np.asfortranarray(f.r[:, f.pivots])
    r2 = np.asfortranarray(f.r[:, nonpivot])
    return r1, r2, nonpivot

"""Subsampled randomized Fourier transform sketch ``Y = S F D A``.

``D`` scales row j by ``exp(2 pi i phi_j)``, ``F`` is the unnormalized DFT
applied to every column and ``S`` keeps rows ``s_1..s_l`` (drawn uniformly
with replacement, so duplicates are possible).
"""

from dataclasses import dataclass

import numba as nb
import numpy as np

from ._parallel import resolve_workers, run_columns
from .errors import ContractViolation
from .fft import fft_columns, is_power_of_two
from .matrix import as_matrix
from .rng import TAG_PHASES, TAG_ROWS, draw_u64, to_unit_halfopen


@dataclass(frozen=True)
class SrftPlan:
    m: int
    l: int
    phases: np.ndarray
    row_samples: np.ndarray

    def __post_init__(self):
        if not 1 <= self.l <= self.m:
            raise ContractViolation(f"need 1 <= l <= m, got l={self.l}, m={self.m}")
        if self.phases.shape != (self.m,) or self.row_samples.shape != (self.l,):
            raise ContractViolation("plan arrays do not match (m, l)")
        if np.any(self.row_samples < 0) or np.any(self.row_samples >= self.m):
            raise ContractViolation("row sample out of range")
        if np.any(self.phases < 0.0) or np.any(self.phases >= 1.0):
            raise ContractViolation("phases must lie in [0, 1)")

    def diagonal(self):
        """The unit-modulus entries of D."""
        ang = 2.0 * np.pi * self.phases
        return np.cos(ang) + 1j * np.sin(ang)


@nb.njit(nogil=True, cache=True)
def _draw_plan(m, l, shift, phase_key, row_key, phases, rows):
    for j in range(m):
        phases[j] = to_unit_halfopen(draw_u64(phase_key, np.uint64(j)))
    for j in range(l):
        h = draw_u64(row_key, np.uint64(j))
        # top log2(m) bits: exactly uniform on 0..m-1
        rows[j] = np.int64(h >> np.uint64(shift)) if shift < 64 else 0


def sample_plan(m, l, rng):
    """Draw the m phases and l row indices that define one sketch."""
    if not is_power_of_two(m):
        raise ContractViolation(f"m must be a power of two, got {m}")
    if not 1 <= l <= m:
        raise ContractViolation(f"need 1 <= l <= m, got l={l}, m={m}")
    phases = np.empty(m, dtype=np.float64)
    rows = np.empty(l, dtype=np.int64)
    shift = 64 - (m.bit_length() - 1)
    _draw_plan(m, l, shift, rng.key(TAG_PHASES), rng.key(TAG_ROWS), phases, rows)
    phases.flags.writeable = False
    rows.flags.writeable = False
    return SrftPlan(m=m, l=l, phases=phases, row_samples=rows)


@nb.njit(nogil=True, cache=True)
def _scale_rows(a, d, out, start, stop):
    m = a.shape[0]
    for j in range(start, stop):
        for i in range(m):
            out[i, j] = a[i, j] * d[i]


@nb.njit(nogil=True, cache=True)
def _gather_rows(src, rows, out, start, stop):
    l = rows.shape[0]
    for j in range(start, stop):
        for r in range(l):
            out[r, j] = src[rows[r], j]


def apply_sketch(a, plan, workers=None):
    """Return ``S F D a`` as a new l x n matrix; `a` is left untouched."""
    a = as_matrix(a, "a")
    if a.shape[0] != plan.m:
        raise ContractViolation(f"plan built for m={plan.m}, matrix has {a.shape[0]} rows")
    workers = resolve_workers(workers)
    n = a.shape[1]
    work = np.empty(a.shape, dtype=np.complex128, order="F")
    run_columns(_scale_rows, n, workers, a, plan.diagonal(), work)
    fft_columns(work, workers=workers)
    y = np.empty((plan.l, n), dtype=np.complex128, order="F")
    run_columns(_gather_rows, n, workers, work, np.asarray(plan.row_samples), y)
    return y


def sketch_operator(plan):
    """Materialize ``S F D`` as a dense l x m matrix (small sizes only)."""
    from .fft import dft_matrix

    s = np.zeros((plan.l, plan.m))
    s[np.arange(plan.l), plan.row_samples] = 1.0
    return s @ dft_matrix(plan.m) @ np.diag(plan.diagonal())

"""Randomized interpolative decomposition ``A ~= B P``.

B holds k actual columns of A (the pivots) and P is the k x n interpolation
matrix whose pivot columns form the identity. The pipeline is: SRFT sketch,
pivoted Gram-Schmidt on the sketch, back substitution for the non-pivot
coefficients, then assembly.
"""

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numba as nb
import numpy as np

from ._parallel import resolve_workers, run_columns
from .errors import ContractViolation, RankDeficient, RankDeficientSketch, SingularTriangular
from .fft import is_power_of_two
from .matrix import (
    adjoint_matvec,
    as_matrix,
    matmul,
    matvec,
    power_iteration,
    read_matrix,
    write_matrix,
)
from .qr import REORTH_THRESHOLD, pivoted_gs_qr, triangular_blocks
from .rng import RngState
from .srft import apply_sketch, sample_plan

DEFAULT_EPSILON = 1e-20
DEFAULT_DELTA = 1e-16
SOLVE_TOL = 1e-13
PHASES = ("randomize_fft", "gram_schmidt", "factor_r", "total")
_RETRY_TAG = 0x7265747279


@dataclass
class BoundParams:
    epsilon: float
    sigma_kplus1_estimate: float
    bound_value: float


@dataclass
class IdDiagnostics:
    phase_seconds: dict = field(default_factory=lambda: dict.fromkeys(PHASES, 0.0))
    err_spectral: float | None = None
    err_frobenius: float | None = None
    sketch_rank_retries: int = 0
    bound_params: BoundParams | None = None
    reorth_steps: int = 0


@dataclass(frozen=True)
class IdResult:
    b: np.ndarray
    p: np.ndarray
    pivots: np.ndarray
    diagnostics: IdDiagnostics = field(compare=False)

    @property
    def k(self):
        return self.b.shape[1]

    @property
    def t(self):
        """The interpolation coefficients (P's non-pivot columns, ascending)."""
        mask = np.ones(self.p.shape[1], dtype=bool)
        mask[self.pivots] = False
        return self.p[:, mask]


@nb.njit(nogil=True, cache=True)
def _back_substitute(r1, r2, t, start, stop):
    k = r1.shape[0]
    for j in range(start, stop):
        for i in range(k - 1, -1, -1):
            s = r2[i, j]
            for c in range(i + 1, k):
                s -= r1[i, c] * t[c, j]
            t[i, j] = s / r1[i, i]


def solve_upper_triangular(r1, r2, workers=None):
    """Solve ``r1 @ t = r2`` for t, one back substitution per column of r2.

    Raises
    ------
    SingularTriangular
        If ``|r1[i, i]| < 1e-13 * max |diag(r1)|`` for some i.
    """
    r1 = as_matrix(r1, "r1")
    k = r1.shape[0]
    if r1.shape[1] != k:
        raise ContractViolation(f"r1 must be square, got {r1.shape}")
    r2 = np.asfortranarray(r2, dtype=np.complex128)
    if r2.ndim != 2 or r2.shape[0] != k:
        raise ContractViolation(f"r2 must have {k} rows, got shape {r2.shape}")
    diag = np.abs(np.diag(r1))
    bad = np.flatnonzero(diag < SOLVE_TOL * diag.max()) if diag.max() > 0 else np.arange(k)
    if bad.size:
        raise SingularTriangular(int(bad[0]))
    t = np.zeros(r2.shape, dtype=np.complex128, order="F")
    run_columns(_back_substitute, r2.shape[1], resolve_workers(workers), r1, r2, t)
    return t


def assemble_interpolation(t, pivots, nonpivot_cols, n):
    """Build P with ``P[:, pivots[i]] = e_i`` and ``P[:, nonpivot_cols] = t``."""
    pivots = np.asarray(pivots, dtype=np.int64).reshape(-1)
    nonpivot_cols = np.asarray(nonpivot_cols, dtype=np.int64).reshape(-1)
    k = pivots.shape[0]
    t = np.asarray(t, dtype=np.complex128).reshape(k, -1)
    if t.shape[1] != nonpivot_cols.shape[0]:
        raise ContractViolation("t has a different column count than nonpivot_cols")
    both = np.concatenate([pivots, nonpivot_cols])
    if both.shape[0] != n or not np.array_equal(np.sort(both), np.arange(n)):
        raise ContractViolation("pivots and nonpivot_cols must partition 0..n-1")
    p = np.zeros((k, n), dtype=np.complex128, order="F")
    p[np.arange(k), pivots] = 1.0
    p[:, nonpivot_cols] = t
    return p


def extract_basis(a, pivots):
    """Copy the pivot columns of `a`, in pivot order."""
    a = as_matrix(a, "a")
    pivots = np.asarray(pivots, dtype=np.int64).reshape(-1)
    n = a.shape[1]
    if pivots.size == 0 or np.any(pivots < 0) or np.any(pivots >= n):
        raise ContractViolation("pivot index out of range")
    if np.unique(pivots).size != pivots.size:
        raise ContractViolation("pivots must be distinct")
    return np.asfortranarray(a[:, pivots])


def error_bound(m, n, k, epsilon, sigma_kplus1):
    """``50 sqrt(mn) (1/epsilon)^(1/k) sigma_{k+1}``, the probabilistic error bound."""
    if not 0.0 < epsilon <= 1.0:
        raise ContractViolation(f"epsilon must lie in (0, 1], got {epsilon}")
    if min(m, n, k) <= 0 or sigma_kplus1 < 0:
        raise ContractViolation("m, n, k must be positive and sigma non-negative")
    # (1/eps)^(1/k) via logs keeps tiny epsilon well-behaved
    return 50.0 * math.sqrt(m * n) * math.exp(-math.log(epsilon) / k) * sigma_kplus1


def sigma_estimate_noise_floor(m, n, delta=DEFAULT_DELTA):
    """Rounding-noise level of sigma_{k+1} for a product formed in precision `delta`."""
    return math.sqrt(2 * min(m, n)) * delta


def _residual_operator(a, b, p, workers):
    def apply(x):
        return matvec(a, x, workers) - matvec(b, matvec(p, x, workers), workers)

    def apply_adjoint(y):
        return adjoint_matvec(a, y, workers) - adjoint_matvec(p, adjoint_matvec(b, y, workers), workers)

    return apply, apply_adjoint


def residual_frobenius(a, b, p, workers=None, block=256):
    """``||a - b p||_F`` computed in column blocks; never forms all of b p."""
    n = a.shape[1]
    total = 0.0
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        d = a[:, lo:hi] - matmul(b, p[:, lo:hi], workers)
        total += float(np.sum(d.real * d.real + d.imag * d.imag))
    return math.sqrt(total)


def reconstruction_error(a, result, rng=None, workers=None, spectral=True, max_iters=100, tol=1e-6):
    """Spectral and Frobenius norms of ``a - B P``.

    The spectral norm comes from power iteration on the residual operator
    ``x -> a x - B (P x)``. Returns ``(spectral, frobenius)``; spectral is
    ``None`` when not requested.
    """
    a = as_matrix(a, "a")
    b, p = result.b, result.p
    if b.shape[0] != a.shape[0] or p.shape[1] != a.shape[1] or b.shape[1] != p.shape[0]:
        raise ContractViolation("factor shapes do not match a")
    workers = resolve_workers(workers)
    fro = residual_frobenius(a, b, p, workers)
    spec = None
    if spectral:
        apply, apply_adjoint = _residual_operator(a, b, p, workers)
        spec = power_iteration(apply, apply_adjoint, a.shape[1], max_iters=max_iters, tol=tol, rng=rng)
    return spec, fro


def randomized_id(
    a,
    k,
    l=None,
    rng=None,
    *,
    workers=None,
    estimate_error=False,
    spectral_error=False,
    epsilon=DEFAULT_EPSILON,
    delta=DEFAULT_DELTA,
    reorth_threshold=REORTH_THRESHOLD,
):
    """Interpolative decomposition of `a` with target rank `k`.

    Parameters
    ----------
    a : array_like, shape (m, n)
        Input; m must be a power of two.
    k : int
        Target rank.
    l : int, optional
        Sketch rows, default ``2 k`` (capped at m).
    rng : RngState, optional
        Randomness for the sketch. A failed sketch is redrawn once from a
        derived substream.
    workers : int, optional
        Thread count for every column-parallel stage. Output does not
        depend on it.
    estimate_error, spectral_error : bool
        Fill in the Frobenius (and optionally spectral) residual norms.
    epsilon, delta : float
        Failure probability and product precision used for the reported
        error bound.

    Returns
    -------
    IdResult
    """
    t_start = time.perf_counter()
    a = as_matrix(a, "a")
    m, n = a.shape
    if not is_power_of_two(m):
        raise ContractViolation(f"row count must be a power of two, got {m}")
    if not 1 <= k <= min(m, n):
        raise ContractViolation(f"need 1 <= k <= min(m, n) = {min(m, n)}, got k={k}")
    if l is None:
        l = min(2 * k, m)
    if not k <= l <= m:
        raise ContractViolation(f"need k <= l <= m, got l={l}")
    workers = resolve_workers(workers)
    rng = rng if rng is not None else RngState()

    diag = IdDiagnostics()
    secs = diag.phase_seconds
    attempt_rng = rng
    for attempt in range(2):
        t0 = time.perf_counter()
        plan = sample_plan(m, l, attempt_rng)
        y = apply_sketch(a, plan, workers=workers)
        t1 = time.perf_counter()
        secs["randomize_fft"] += t1 - t0
        try:
            f = pivoted_gs_qr(y, k, workers=workers, reorth_threshold=reorth_threshold)
        except RankDeficientSketch as exc:
            secs["gram_schmidt"] += time.perf_counter() - t1
            if attempt == 1:
                raise RankDeficient(exc.achieved_rank) from exc
            diag.sketch_rank_retries += 1
            attempt_rng = rng.derive(_RETRY_TAG)
            continue
        t2 = time.perf_counter()
        secs["gram_schmidt"] += (t2 - t1) - f.update_seconds
        r1, r2, nonpivot = triangular_blocks(f)
        t = solve_upper_triangular(r1, r2, workers=workers)
        p = assemble_interpolation(t, f.pivots, nonpivot, n)
        b = extract_basis(a, f.pivots)
        secs["factor_r"] += f.update_seconds + (time.perf_counter() - t2)
        diag.reorth_steps = f.reorth_steps
        break

    sigma = sigma_estimate_noise_floor(m, n, delta)
    diag.bound_params = BoundParams(epsilon, sigma, error_bound(m, n, k, epsilon, sigma))
    pivots = np.array(f.pivots)
    for arr in (b, p, pivots):
        arr.flags.writeable = False
    result = IdResult(b=b, p=p, pivots=pivots, diagnostics=diag)
    secs["total"] = time.perf_counter() - t_start
    if estimate_error or spectral_error:
        spec, fro = reconstruction_error(a, result, rng=rng, workers=workers, spectral=spectral_error)
        diag.err_frobenius = fro
        diag.err_spectral = spec
    return result


def save_result(prefix, result, seed=None, stream=None):
    """Write ``<prefix>_b.ridm``, ``<prefix>_p.ridm`` and ``<prefix>.json``."""
    write_matrix(f"{prefix}_b.ridm", result.b)
    write_matrix(f"{prefix}_p.ridm", result.p)
    meta = {
        "m": result.b.shape[0],
        "n": result.p.shape[1],
        "k": result.k,
        "pivots": [int(i) for i in result.pivots],
        "seed": seed,
        "stream": stream,
        "diagnostics": asdict(result.diagnostics),
    }
    with open(f"{prefix}.json", "w") as fh:
        json.dump(meta, fh, indent=2)
    return meta


def load_result(prefix):
    b = read_matrix(f"{prefix}_b.ridm")
    p = read_matrix(f"{prefix}_p.ridm")
    with open(f"{prefix}.json") as fh:
        meta = json.load(fh)
    d = meta.get("diagnostics") or {}
    bp = d.pop("bound_params", None)
    diag = IdDiagnostics(**d)
    diag.bound_params = BoundParams(**bp) if bp else None
    return IdResult(b=b, p=p, pivots=np.asarray(meta["pivots"], dtype=np.int64), diagnostics=diag)

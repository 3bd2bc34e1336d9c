"""Benchmark harness: synthetic low-rank inputs, per-phase timings, error checks."""

import csv
import json
import logging
import os
import warnings
from dataclasses import asdict, dataclass, field, fields

from .errors import ContractViolation
from .fft import is_power_of_two
from .interpolative import DEFAULT_EPSILON, error_bound, randomized_id, reconstruction_error
from .matrix import gaussian_complex_matrix, matmul
from .rng import RngState

log = logging.getLogger(__name__)

CSV_HEADER = (
    "m,n,k,l,seed,workers,repeats,t_fft,t_gs,t_factor_r,t_total,"
    "speedup_fft,speedup_gs,speedup_factor_r,speedup_total,"
    "err_frobenius,err_spectral,bound_value,bound_satisfied"
).split(",")

_TIME_FIELDS = ("t_fft", "t_gs", "t_factor_r", "t_total")
_SPEEDUP_FIELDS = ("speedup_fft", "speedup_gs", "speedup_factor_r", "speedup_total")
_ERROR_FIELDS = ("err_frobenius", "err_spectral", "bound_value")
_INT_FIELDS = ("m", "n", "k", "l", "seed", "workers", "repeats")
_PHASE_KEYS = {"t_fft": "randomize_fft", "t_gs": "gram_schmidt", "t_factor_r": "factor_r", "t_total": "total"}

# streams within one seed
_STREAM_B = 1
_STREAM_P = 2
_STREAM_SKETCH = 3


@dataclass
class BenchConfig:
    m: int
    n: int
    k: int
    l: int | None = None
    seeds: list = field(default_factory=lambda: [1])
    worker_counts: list = field(default_factory=lambda: [1])
    repeats: int = 5
    warmup: int = 1
    epsilon: float = DEFAULT_EPSILON
    compute_spectral_error: bool = False
    output: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.l is None:
            self.l = 2 * self.k
        if not is_power_of_two(self.m):
            raise ContractViolation(f"m must be a power of two, got {self.m}")
        if not 1 <= self.k <= min(self.m, self.n):
            raise ContractViolation(f"need 1 <= k <= min(m, n), got k={self.k}")
        if not self.k <= self.l <= self.m:
            raise ContractViolation(f"need k <= l <= m, got l={self.l}")
        if not self.seeds:
            raise ContractViolation("at least one seed is required")
        if not self.worker_counts or any(int(w) < 1 for w in self.worker_counts):
            raise ContractViolation("worker counts must be a non-empty list of positive integers")
        if self.repeats < 1:
            raise ContractViolation("repeats must be >= 1")
        if not 0.0 < self.epsilon <= 1.0:
            raise ContractViolation("epsilon must lie in (0, 1]")
        if self.format not in ("csv", "json"):
            raise ContractViolation(f"unknown format {self.format!r}")


@dataclass
class BenchRecord:
    m: int
    n: int
    k: int
    l: int
    seed: int
    workers: int
    repeats: int
    t_fft: float
    t_gs: float
    t_factor_r: float
    t_total: float
    speedup_fft: float = 1.0
    speedup_gs: float = 1.0
    speedup_factor_r: float = 1.0
    speedup_total: float = 1.0
    err_frobenius: float | None = None
    err_spectral: float | None = None
    bound_value: float | None = None
    bound_satisfied: bool = False
    baseline_workers: int = field(default=1, compare=False)

    def non_timing(self):
        skip = set(_TIME_FIELDS) | set(_SPEEDUP_FIELDS)
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name not in skip}


def generate_low_rank(m, n, k, rng, workers=None):
    """``A = B0 @ P0`` with complex Gaussian B0 (m x k) and P0 (k x n)."""
    if not 1 <= k <= min(m, n):
        raise ContractViolation(f"need 1 <= k <= min(m, n), got k={k}")
    b0 = gaussian_complex_matrix(m, k, rng.derive(_STREAM_B), workers=workers)
    p0 = gaussian_complex_matrix(k, n, rng.derive(_STREAM_P), workers=workers)
    return matmul(b0, p0, workers=workers)


def _time_runs(a, cfg, rng, workers):
    for _ in range(cfg.warmup):
        randomized_id(a, cfg.k, cfg.l, rng, workers=workers)
    best = dict.fromkeys(_TIME_FIELDS, float("inf"))
    result = None
    for _ in range(cfg.repeats):
        result = randomized_id(a, cfg.k, cfg.l, rng, workers=workers)
        secs = result.diagnostics.phase_seconds
        for name, key in _PHASE_KEYS.items():
            best[name] = min(best[name], secs[key])
    return best, result


def run_benchmark(config):
    """Run the sweep described by `config`; one record per (seed, worker count).

    Numerical fields depend only on the seed; timings are the per-phase minimum
    over `config.repeats` runs after `config.warmup` discarded runs.
    """
    cfg = config
    ncpu = os.cpu_count() or 1
    over = [w for w in cfg.worker_counts if w > ncpu]
    if over:
        warnings.warn(f"worker counts {over} exceed the {ncpu} available CPUs", RuntimeWarning, stacklevel=2)
    baseline = min(cfg.worker_counts)
    records = []
    for seed in cfg.seeds:
        root = RngState(int(seed))
        a = generate_low_rank(cfg.m, cfg.n, cfg.k, root, workers=max(cfg.worker_counts))
        rng = root.derive(_STREAM_SKETCH)
        rows = []
        for w in cfg.worker_counts:
            log.info("seed=%s workers=%d", seed, w)
            best, result = _time_runs(a, cfg, rng, int(w))
            spec, fro = reconstruction_error(a, result, rng=rng, workers=int(w), spectral=cfg.compute_spectral_error)
            bound = error_bound_for(result, cfg.epsilon)
            measured = spec if spec is not None else fro
            rows.append(
                BenchRecord(
                    m=cfg.m, n=cfg.n, k=cfg.k, l=cfg.l, seed=int(seed), workers=int(w), repeats=cfg.repeats,
                    **best,
                    err_frobenius=fro, err_spectral=spec, bound_value=bound,
                    bound_satisfied=bool(measured <= bound), baseline_workers=baseline,
                )
            )
        base = next(r for r in rows if r.workers == baseline)
        for r in rows:
            for t_name, s_name in zip(_TIME_FIELDS, _SPEEDUP_FIELDS):
                cur = getattr(r, t_name)
                setattr(r, s_name, getattr(base, t_name) / cur if cur > 0 else float("nan"))
        records.extend(rows)
    return records


def error_bound_for(result, epsilon):
    bp = result.diagnostics.bound_params
    return error_bound(result.b.shape[0], result.p.shape[1], result.k, epsilon, bp.sigma_kplus1_estimate)


def _fmt(name, value):
    if value is None:
        return ""
    if name == "bound_satisfied":
        return "true" if value else "false"
    if name in _INT_FIELDS:
        return str(int(value))
    if name in _ERROR_FIELDS:
        return f"{value:.2e}"
    return f"{value:.6g}"


def emit_report(records, fmt, path):
    """Write records as CSV (fixed header) or a JSON array.

    CSV rounds times and speed-ups to 6 significant digits and errors to 3;
    JSON keeps full precision.
    """
    if not records:
        raise ContractViolation("no records to emit")
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for r in records:
                writer.writerow([_fmt(name, getattr(r, name)) for name in CSV_HEADER])
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump([asdict(r) for r in records], fh, indent=2)
    else:
        raise ContractViolation(f"unknown format {fmt!r}")


def _parse(name, text):
    if text == "":
        return None
    if name == "bound_satisfied":
        return text == "true"
    if name in _INT_FIELDS:
        return int(text)
    return float(text)


def load_report(path):
    """Read a CSV report back into a list of dicts keyed by the header."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ContractViolation(f"{path}: unexpected header {header}")
        return [{name: _parse(name, cell) for name, cell in zip(header, row)} for row in reader]

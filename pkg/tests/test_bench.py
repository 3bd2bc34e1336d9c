import csv
import json
import warnings

import numpy as np
import pytest

from rid.bench import CSV_HEADER, BenchConfig, emit_report, generate_low_rank, load_report, run_benchmark
from rid.errors import ContractViolation
from rid.rng import RngState


def small_config(**kw):
    base = dict(m=256, n=256, k=16, seeds=[1, 2], worker_counts=[1], repeats=1)
    base.update(kw)
    return BenchConfig(**base)


class TestGenerate:
    def test_full_row_rank(self):
        a = generate_low_rank(16, 24, 16, RngState(1))
        assert np.linalg.svd(a, compute_uv=False)[-1] > 0

    def test_rank_one_collinear(self):
        a = generate_low_rank(32, 10, 1, RngState(2))
        u = a[:, 0] / np.linalg.norm(a[:, 0])
        for j in range(10):
            col = a[:, j]
            assert np.linalg.norm(col - u * np.vdot(u, col)) <= 1e-12 * np.linalg.norm(col)

    def test_singular_value_gap(self):
        sv = np.linalg.svd(generate_low_rank(64, 64, 8, RngState(3)), compute_uv=False)
        assert sv[8] / sv[0] <= 1e-13

    def test_deterministic(self):
        assert np.array_equal(generate_low_rank(16, 8, 3, RngState(4)), generate_low_rank(16, 8, 3, RngState(4)))

    def test_k_too_large(self):
        with pytest.raises(ContractViolation):
            generate_low_rank(8, 4, 5, RngState())


class TestConfig:
    def test_default_l(self):
        assert small_config().l == 32

    @pytest.mark.parametrize(
        "kw",
        [dict(m=100), dict(k=300), dict(l=8), dict(l=512), dict(worker_counts=[]), dict(worker_counts=[0]),
         dict(seeds=[]), dict(repeats=0), dict(epsilon=2.0), dict(format="xml")],
    )
    def test_invalid(self, kw):
        with pytest.raises(ContractViolation):
            small_config(**kw)


class TestRunBenchmark:
    def test_smoke(self):
        records = run_benchmark(small_config())
        assert len(records) == 2
        assert all(r.bound_satisfied for r in records)
        assert [r.seed for r in records] == [1, 2]

    def test_repeatable_except_timings(self):
        a = run_benchmark(small_config(seeds=[3]))
        b = run_benchmark(small_config(seeds=[3]))
        assert [r.non_timing() for r in a] == [r.non_timing() for r in b]

    def test_errors_invariant_to_workers(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            recs = run_benchmark(small_config(seeds=[5], worker_counts=[1, 2, 3], compute_spectral_error=True))
        assert len({r.err_frobenius for r in recs}) == 1
        assert len({r.err_spectral for r in recs}) == 1
        base = recs[0]
        assert base.speedup_total == 1.0
        assert recs[2].speedup_fft == pytest.approx(base.t_fft / recs[2].t_fft)
        assert all(r.baseline_workers == 1 for r in recs)

    def test_warns_when_oversubscribed(self):
        import os

        with pytest.warns(RuntimeWarning):
            run_benchmark(small_config(seeds=[1], worker_counts=[(os.cpu_count() or 1) + 1]))


class TestEmit:
    def test_one_record_two_lines(self, tmp_path):
        path = tmp_path / "r.csv"
        emit_report(run_benchmark(small_config(seeds=[1])), "csv", path)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0] == ",".join(CSV_HEADER)

    def test_csv_parse_back(self, tmp_path):
        records = run_benchmark(small_config(compute_spectral_error=True))
        path = tmp_path / "r.csv"
        emit_report(records, "csv", path)
        rows = load_report(path)
        for rec, row in zip(records, rows):
            for name in ("m", "n", "k", "l", "seed", "workers", "repeats", "bound_satisfied"):
                assert row[name] == getattr(rec, name)
            for name in ("err_frobenius", "err_spectral", "bound_value"):
                assert row[name] == float(f"{getattr(rec, name):.2e}")

    def test_number_formats(self, tmp_path):
        path = tmp_path / "r.csv"
        emit_report(run_benchmark(small_config(seeds=[1])), "csv", path)
        with open(path) as fh:
            row = next(csv.DictReader(fh))
        mantissa = row["err_frobenius"].split("e")[0]
        assert len(mantissa.replace(".", "").lstrip("-")) == 3
        assert len(row["t_total"].split("e")[0].replace(".", "").lstrip("0")) <= 6

    def test_json_exact(self, tmp_path):
        records = run_benchmark(small_config(seeds=[1]))
        path = tmp_path / "r.json"
        emit_report(records, "json", path)
        data = json.loads(path.read_text())
        assert data[0]["err_frobenius"] == records[0].err_frobenius
        assert data[0]["t_fft"] == records[0].t_fft

    def test_empty_records(self, tmp_path):
        path = tmp_path / "none.csv"
        with pytest.raises(ContractViolation):
            emit_report([], "csv", path)
        assert not path.exists()

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rid.errors import ContractViolation
from rid.fft import dft_oracle, fft_column, fft_columns, twiddle_table

from conftest import crandn


def rel_max(x, ref):
    return np.max(np.abs(x - ref)) / np.max(np.abs(ref))


def transformed(x):
    y = np.array(x, dtype=np.complex128)
    fft_column(y)
    return y


def test_delta_to_constant():
    assert np.allclose(transformed([1, 0, 0, 0]), [1, 1, 1, 1], atol=0)


def test_constant_to_delta():
    assert np.array_equal(transformed([1, 1, 1, 1]), [4, 0, 0, 0])


def test_length_eight_against_oracle():
    x = crandn(8, 21)
    assert rel_max(transformed(x), dft_oracle(x)) <= 1e-14


def test_twiddles_unit_magnitude_and_shared():
    tw = twiddle_table(256)
    assert np.max(np.abs(np.abs(tw) - 1.0)) <= 1e-15
    assert twiddle_table(256) is tw
    assert not tw.flags.writeable


@pytest.mark.parametrize("m", [3, 6, 12, 0])
def test_rejects_non_power_of_two(m):
    with pytest.raises(ContractViolation):
        fft_column(np.zeros(m, dtype=np.complex128))


def test_rejects_wrong_table():
    with pytest.raises(ContractViolation):
        fft_column(np.zeros(8, dtype=np.complex128), twiddle_table(16))


def test_strided_input():
    base = crandn(16, 22)
    view = base[::2]
    expect = dft_oracle(view)
    fft_column(view)
    assert rel_max(view, expect) <= 1e-14


@pytest.mark.parametrize("logm", range(1, 11))
def test_all_sizes_against_oracle(logm):
    x = crandn(2**logm, 100 + logm)
    assert rel_max(transformed(x), dft_oracle(x)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10), st.integers(0, 2**32), st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_linearity_and_energy(logm, seed, alpha, beta):
    m = 2**logm
    x, y = crandn(m, seed), crandn(m, seed + 1)
    fx, fy = transformed(x), transformed(y)
    comb = transformed(alpha * x + beta * y)
    expect = alpha * fx + beta * fy
    scale = max(np.max(np.abs(expect)), np.max(np.abs(alpha * fx)), np.max(np.abs(beta * fy)), 1e-300)
    assert np.max(np.abs(comb - expect)) <= 1e-12 * scale
    assert np.sum(np.abs(fx) ** 2) == pytest.approx(m * np.sum(np.abs(x) ** 2), rel=1e-12)


class TestColumns:
    def test_single_column(self):
        a = np.asfortranarray(np.array([[1], [0], [0], [0]], dtype=complex))
        fft_columns(a)
        assert np.allclose(a[:, 0], [1, 1, 1, 1], atol=0)

    def test_identical_columns_stay_identical(self):
        col = crandn(32, 23)
        a = np.asfortranarray(np.tile(col[:, None], (1, 5)))
        fft_columns(a, workers=3)
        assert all(np.array_equal(a[:, 0], a[:, j]) for j in range(5))

    def test_against_oracle(self):
        a = crandn((64, 16), 24)
        out = a.copy(order="F")
        fft_columns(out)
        err = max(rel_max(out[:, j], dft_oracle(a[:, j])) for j in range(16))
        assert err <= 1e-13

    @pytest.mark.parametrize("workers", [2, 4, 7])
    def test_worker_invariant(self, workers):
        a = crandn((128, 23), 25)
        one, many = a.copy(order="F"), a.copy(order="F")
        fft_columns(one, workers=1)
        fft_columns(many, workers=workers)
        assert np.array_equal(one, many)

    def test_matches_sequential_column_calls(self):
        a = crandn((32, 6), 26)
        whole = a.copy(order="F")
        fft_columns(whole, workers=3)
        for j in range(6):
            col = a[:, j].copy()
            fft_column(col)
            assert np.array_equal(col, whole[:, j])

    def test_requires_column_major(self):
        with pytest.raises(ContractViolation):
            fft_columns(np.zeros((4, 3), dtype=np.complex128, order="C"))


class TestOracle:
    def test_length_one(self):
        assert dft_oracle([2 + 3j]).tolist() == [2 + 3j]

    def test_delta(self):
        assert np.allclose(dft_oracle([1, 0, 0, 0]), [1, 1, 1, 1], atol=0)

    def test_parseval(self):
        x = crandn(8, 27)
        assert np.sum(np.abs(dft_oracle(x)) ** 2) == pytest.approx(8 * np.sum(np.abs(x) ** 2), rel=1e-13)

    def test_matches_numpy(self):
        x = crandn(12, 28)
        assert rel_max(dft_oracle(x), np.fft.fft(x)) <= 1e-13

import numpy as np
import pytest

from rid.matrix import gaussian_complex_matrix, matmul
from rid.rng import RngState

_ACCEPTANCE = []


def record_criterion(number, name, passed, detail=""):
    _ACCEPTANCE.append((number, name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        status = {True: "PASS", False: "FAIL", None: "N/A "}[passed]
        terminalreporter.write_line(f"[{status}] {number}. {name}: {detail}")


def crandn(shape, seed):
    gen = np.random.default_rng(seed)
    return np.asfortranarray(gen.standard_normal(shape) + 1j * gen.standard_normal(shape))


def low_rank(m, n, k, seed):
    b = gaussian_complex_matrix(m, k, RngState(seed, 1))
    p = gaussian_complex_matrix(k, n, RngState(seed, 2))
    return matmul(b, p)


@pytest.fixture
def rng():
    return RngState(seed=20240601, stream=0)

"""Parallel randomized interpolative decomposition.

>>> from rid import RngState, randomized_id
>>> result = randomized_id(a, k=16, rng=RngState(seed=7))  # doctest: +SKIP
>>> result.b.shape, result.p.shape  # doctest: +SKIP
"""

from .errors import ContractViolation, RankDeficient, RankDeficientSketch, RidError, SingularTriangular
from .fft import dft_oracle, fft_column, fft_columns, twiddle_table
from .interpolative import (
    IdDiagnostics,
    IdResult,
    assemble_interpolation,
    error_bound,
    extract_basis,
    load_result,
    randomized_id,
    reconstruction_error,
    save_result,
    sigma_estimate_noise_floor,
    solve_upper_triangular,
)
from .matrix import (
    frobenius_norm,
    gaussian_complex_matrix,
    matmul,
    read_matrix,
    spectral_norm_estimate,
    write_matrix,
)
from .qr import PivotedQr, pivoted_gs_qr, triangular_blocks
from .rng import RngState
from .srft import SrftPlan, apply_sketch, sample_plan

__version__ = "0.1.0"

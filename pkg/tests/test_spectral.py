"""Spectra and log-determinant sums against independent linear algebra.

log_det_shift is computed from eigenvalues; the oracle below recomputes
the same quantity with numpy's LU-based slogdet on the shifted matrix,
an independent code path.
"""

import math

import numpy as np
import pytest

from swd.rmt import DataMatrix, NoiseSpec, Seed, sample_noise
from swd.spectral import SIGNAL_CERTAIN, SpectrumResult, eigvals_sym, log_det_shift, traces

LD_EXAMPLE = -0.5753641449035618  # eigenvalues {2, -2}, omega = 0.25


def test_eigvals_diagonal():
    m = np.diag([3.0, -1.0, 2.0])
    spec = eigvals_sym(m)
    np.testing.assert_allclose(spec.eigvals, [3.0, 2.0, -1.0], atol=1e-12)
    assert spec.n == 3


def test_eigvals_descending_order():
    h = sample_noise(32, NoiseSpec.goe(), Seed(1))
    v = eigvals_sym(h).eigvals
    assert np.all(np.diff(v) <= 0)


def test_eigvals_hermitian_complex():
    m = np.array([[0.0, 1j], [-1j, 0.0]])
    np.testing.assert_allclose(eigvals_sym(m).eigvals, [1.0, -1.0], atol=1e-12)


def test_eigvals_rejects_asymmetric():
    with pytest.raises(ValueError):
        eigvals_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eigvals_rejects_nonfinite():
    with pytest.raises(ValueError):
        eigvals_sym(np.array([[np.inf, 0.0], [0.0, 0.0]]))


def test_eigvals_are_read_only():
    spec = eigvals_sym(np.eye(3))
    with pytest.raises(ValueError):
        spec.eigvals[0] = 7.0


def test_log_det_shift_example():
    spec = SpectrumResult(eigvals=np.array([2.0, -2.0]), n=2)
    got = log_det_shift(spec, 0.25)
    assert math.isclose(got, LD_EXAMPLE, rel_tol=1e-15)
    # hand value: log(0.25) + log(2.25)
    assert math.isclose(got, math.log(0.25) + math.log(2.25), rel_tol=1e-14)


def test_log_det_shift_vs_slogdet():
    rng = np.random.default_rng(314)
    a = rng.standard_normal((32, 32))
    m = (a + a.T) / 8.0
    for omega in (0.1, 0.5, 0.9):
        shifted = (1.0 + omega) * np.eye(32) - math.sqrt(omega) * m
        sign, ref = np.linalg.slogdet(shifted)
        assert sign == 1.0
        got = log_det_shift(eigvals_sym(m), omega)
        assert math.isclose(got, ref, rel_tol=1e-10)


def test_log_det_shift_signal_certain():
    spec = SpectrumResult(eigvals=np.array([2.5, 0.0]), n=2)
    assert log_det_shift(spec, 0.5) is SIGNAL_CERTAIN
    # boundary eigenvalue: factor is exactly zero
    b = math.sqrt(0.5) + 1.0 / math.sqrt(0.5)
    spec = SpectrumResult(eigvals=np.array([b, 0.0]), n=2)
    assert log_det_shift(spec, 0.5) is SIGNAL_CERTAIN


def test_log_det_shift_omega_range():
    spec = SpectrumResult(eigvals=np.array([0.0]), n=1)
    for omega in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            log_det_shift(spec, omega)


def test_traces_real():
    m = np.array([[1.0, 2.0], [2.0, -3.0]])
    tr1, tr2 = traces(m)
    assert tr1 == -2.0
    assert tr2 == 1.0 + 4.0 + 4.0 + 9.0
    # tr2 agrees with Tr M^2 for symmetric input
    assert math.isclose(tr2, float(np.trace(m @ m)), rel_tol=1e-15)


def test_traces_complex():
    m = np.array([[1.0, 0.5 + 0.5j], [0.5 - 0.5j, 2.0]])
    tr1, tr2 = traces(m)
    assert tr1 == 3.0
    assert math.isclose(tr2, 1.0 + 4.0 + 2 * 0.5, rel_tol=1e-15)
    assert math.isclose(tr2, float(np.trace(m @ m).real), rel_tol=1e-14)


def test_traces_accepts_data_matrix():
    h = sample_noise(16, NoiseSpec.goe(), Seed(6))
    t_obj = traces(h)
    t_arr = traces(h.entries)
    assert t_obj == t_arr


def test_noise_bulk_edge():
    # top eigenvalue of pure noise concentrates near 2
    h = sample_noise(512, NoiseSpec.goe(), Seed(20260815, 30))
    mu1 = eigvals_sym(h).eigvals[0]
    assert 1.8 < mu1 < 2.2

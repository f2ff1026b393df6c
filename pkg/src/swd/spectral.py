"""Eigenvalues and the spectral sums the detection statistics are built from."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rmt import DataMatrix

__all__ = [
    "Outcome",
    "SIGNAL_CERTAIN",
    "SpectrumResult",
    "eigvals_sym",
    "log_det_shift",
    "traces",
]


class Outcome:
    """Distinguished non-numeric result of a statistic (not an error)."""

    __slots__ = ("name",)

    def __init__(self, name: str) -> None:
        self.name = name

    def __repr__(self) -> str:
        return self.name


# An eigenvalue sits outside the statistic's domain: the bulk cannot
# produce it, so the signal is present and downstream decisions reject.
SIGNAL_CERTAIN = Outcome("SignalCertain")


@dataclass(frozen=True)
class SpectrumResult:
    """Real eigenvalues sorted descending."""

    eigvals: np.ndarray
    n: int


def _as_array(m) -> np.ndarray:
    return m.entries if isinstance(m, DataMatrix) else np.asarray(m)


def eigvals_sym(m) -> SpectrumResult:
    """Eigenvalues of a symmetric/Hermitian matrix, descending."""
    a = _as_array(m)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if float(np.max(np.abs(a - a.conj().T))) > 1e-8 * scale:
        raise ValueError("matrix is not symmetric")
    vals = np.linalg.eigvalsh(a)[::-1].copy()
    vals.setflags(write=False)
    return SpectrumResult(eigvals=vals, n=a.shape[0])


def log_det_shift(spec: SpectrumResult, omega: float):
    """sum_i log((1+omega) - sqrt(omega) mu_i), or SIGNAL_CERTAIN.

    The factors are all positive iff mu_1 < sqrt(omega) + 1/sqrt(omega);
    a larger top eigenvalue lies outside the noise bulk.
    """
    if not 0.0 < omega < 1.0:
        raise ValueError("omega must lie in (0, 1)")
    factors = (1.0 + omega) - math.sqrt(omega) * spec.eigvals
    # eigvals descending, so factors[0] is the smallest
    if factors[0] <= 0.0:
        return SIGNAL_CERTAIN
    return float(np.sum(np.log(factors)))


def traces(m) -> tuple:
    """(Tr M, sum_ij |M_ij|^2); the second equals Tr M^2 for Hermitian M."""
    a = _as_array(m)
    tr1 = float(np.trace(a).real)
    tr2 = float(np.sum(np.abs(a) ** 2))
    return tr1, tr2

"""Entrywise transforms that raise the effective SNR for non-Gaussian noise.

Applying the score function of the entry density to each entry (scaled to
unit variance) turns a spike of size lambda into one of size lambda * F,
where F is the Fisher information of the density. All limiting formulas
for the transformed test are the plain ones with omega -> omega * F plus
correction terms in the functionals (F, F_d, G) and the fourth moment of
the transformed entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .cheb import DEFAULT_NODES, AnalyticFn, cheb_coeffs, default_ellmax, lss
from .lsstest import LimitingMoments
from .rmt import DataMatrix
from .special import erfc
from .spectral import (
    SIGNAL_CERTAIN,
    Outcome,
    SpectrumResult,
    eigvals_sym,
    log_det_shift,
    traces,
)

__all__ = [
    "RELIABLY_DETECTABLE",
    "DensitySpec",
    "FisherFunctionals",
    "fisher_functionals",
    "transform",
    "phi_tilde",
    "statistic_Ltilde",
    "critical_tilde",
    "limiting_moments_tilde",
    "theoretical_error_tilde",
    "edge_threshold",
    "clt_mean_transformed",
    "check_delocalization",
]

# Hypothesized omega * F >= 1: the transformed spike sits above the BBP
# threshold, so thresholding the top eigenvalue detects it reliably and
# the weak-detection formulas do not apply.
RELIABLY_DETECTABLE = Outcome("ReliablyDetectable")

_TINY = 1e-280


@dataclass(frozen=True)
class DensitySpec:
    """Entry density of sqrt(n) * H_ij: zero mean, unit variance.

    pdf/dpdf are vectorized callables; dpdf may be omitted, in which case
    the score is formed by central finite differences (slightly less
    accurate). Built-in kinds carry closed-form functionals and transforms.
    """

    kind: str
    pdf: Optional[Callable] = None
    dpdf: Optional[Callable] = None

    @staticmethod
    def gaussian() -> "DensitySpec":
        return DensitySpec("gaussian")

    @staticmethod
    def sech() -> "DensitySpec":
        return DensitySpec("sech")

    @staticmethod
    def custom(pdf: Callable, dpdf: Optional[Callable] = None) -> "DensitySpec":
        return DensitySpec("custom", pdf=pdf, dpdf=dpdf)


@dataclass(frozen=True)
class FisherFunctionals:
    """Functionals of the entry density driving the transformed test.

    F: Fisher information (off-diagonal); F_d: same for the diagonal law;
    G: quadratic spike response of the transformed entries; w4_tilde:
    fourth moment of the transformed (unit-variance) entries.
    """

    F: float
    F_d: float
    G: float
    w4_tilde: float


_GAUSSIAN_FI = FisherFunctionals(1.0, 1.0, 1.0, 3.0)
_SECH_FI = FisherFunctionals(
    math.pi**2 / 8.0, math.pi**2 / 8.0, math.pi**2 / 16.0, 1.5
)


def _window(pdf: Callable) -> float:
    w = 1.0
    while float(pdf(w)) >= 1e-16 or float(pdf(-w)) >= 1e-16:
        w *= 2.0
        if w > 1e6:
            raise ValueError("density tail does not fall below 1e-16")
    return w


def _simpson_weights(xs: np.ndarray) -> np.ndarray:
    m = xs.size - 1
    h = (xs[-1] - xs[0]) / m
    w = np.full(xs.size, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)


def _numeric_functionals(density: DensitySpec) -> FisherFunctionals:
    pdf = density.pdf
    if pdf is None:
        raise ValueError("custom density needs a pdf")
    w = _window(pdf)
    xs = np.linspace(-w, w, (1 << 15) + 1)
    p = np.asarray(pdf(xs), dtype=float)
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError("pdf must be finite and nonnegative on the window")
    if density.dpdf is not None:
        dp = np.asarray(density.dpdf(xs), dtype=float)
    else:
        step = w * 2e-6
        dp = (np.asarray(pdf(xs + step), dtype=float)
              - np.asarray(pdf(xs - step), dtype=float)) / (2.0 * step)
    wts = _simpson_weights(xs)
    mass = float(wts @ p)
    mean = float(wts @ (xs * p))
    var = float(wts @ (xs * xs * p))
    if abs(mass - 1.0) > 1e-4:
        raise ValueError(f"pdf integrates to {mass:.6g}, not 1")
    if abs(mean) > 1e-3 or abs(var - 1.0) > 1e-3:
        raise ValueError(f"density must have mean 0, variance 1 (got {mean:.3g}, {var:.3g})")
    score = np.where(p > _TINY, -dp / np.where(p > _TINY, p, 1.0), 0.0)
    F = float(wts @ (score * score * p))
    if F <= 0.0:
        raise ValueError("Fisher information must be positive")
    h4 = float(wts @ (score**4 * p))
    w4t = h4 / (F * F)
    # G = E[g'^2 + g g''] for g = score/sqrt(F); by parts this is E[h^4]/(3F)
    G = F * w4t / 3.0
    return FisherFunctionals(F=F, F_d=F, G=G, w4_tilde=w4t)


def fisher_functionals(density: DensitySpec) -> FisherFunctionals:
    """(F, F_d, G, w4_tilde); closed forms for built-ins, quadrature otherwise."""
    if density.kind == "gaussian":
        return _GAUSSIAN_FI
    if density.kind == "sech":
        return _SECH_FI
    if density.kind == "custom":
        return _numeric_functionals(density)
    raise ValueError(f"unknown density kind: {density.kind!r}")


def transform(data: Union[DataMatrix, np.ndarray], density: DensitySpec) -> DataMatrix:
    """Apply the unit-variance score transform entrywise.

    The gaussian transform is the identity and returns its input object
    unchanged, so applying it twice is bit-for-bit idempotent.
    """
    if density.kind == "gaussian":
        if isinstance(data, DataMatrix):
            return data
        a = np.asarray(data)
        return DataMatrix(n=a.shape[0], entries=a, complex=bool(np.iscomplexobj(a)))
    if isinstance(data, DataMatrix):
        if data.complex:
            raise ValueError("entrywise transforms are defined for real matrices")
        a = data.entries
    else:
        a = np.asarray(data, dtype=float)
    n = a.shape[0]
    rt = math.sqrt(n)
    if density.kind == "sech":
        out = math.sqrt(2.0 / n) * np.tanh(0.5 * math.pi * rt * a)
        return DataMatrix(n=n, entries=out, complex=False)
    if density.kind != "custom":
        raise ValueError(f"unknown density kind: {density.kind!r}")
    fi = fisher_functionals(density)
    y = rt * a
    p = np.asarray(density.pdf(y), dtype=float)
    if density.dpdf is not None:
        dp = np.asarray(density.dpdf(y), dtype=float)
    else:
        step = 2e-6 * _window(density.pdf)
        dp = (np.asarray(density.pdf(y + step), dtype=float)
              - np.asarray(density.pdf(y - step), dtype=float)) / (2.0 * step)
    score = np.where(p > _TINY, -dp / np.where(p > _TINY, p, 1.0), 0.0)
    out = score / (math.sqrt(fi.F) * rt)
    return DataMatrix(n=n, entries=out, complex=False)


def _coeffs(omega: float, w2: float, fi: FisherFunctionals) -> tuple:
    """(s, a, b) of the transformed test function; s = omega * F."""
    if not 0.0 < omega < 1.0:
        raise ValueError("omega must lie in (0, 1)")
    if w2 <= 0.0:
        raise ValueError("w2 must be positive")
    s = omega * fi.F
    a = math.sqrt(omega) * (2.0 * math.sqrt(fi.F_d) / w2 - math.sqrt(fi.F))
    b = omega * (fi.G / (fi.w4_tilde - 1.0) - fi.F / 2.0)
    return s, a, b


def _require_subcritical(s: float) -> None:
    if s >= 1.0:
        raise ValueError(
            "omega * F >= 1: reliably detectable; threshold the top eigenvalue"
        )


def phi_tilde(omega: float, w2: float, fi: FisherFunctionals) -> AnalyticFn:
    """Optimal test function for the transformed matrix."""
    s, a, b = _coeffs(omega, w2, fi)
    _require_subcritical(s)
    r = math.sqrt(s)
    bound = r + 1.0 / r

    def _eval(x):
        x = np.asarray(x, dtype=float)
        return -np.log1p(s - r * x) + a * x + b * x * x

    return AnalyticFn(
        eval=_eval,
        label=f"phi-tilde[omega={omega:g}, w2={w2:g}]",
        domain=(-bound, bound),
    )


def statistic_Ltilde(
    data: Union[DataMatrix, np.ndarray, SpectrumResult],
    omega: float,
    w2: float,
    fi: FisherFunctionals,
    nodes: int = DEFAULT_NODES,
):
    """L-tilde on an already transformed matrix, or a distinguished outcome.

    Returns RELIABLY_DETECTABLE when omega * F >= 1 (no weak-detection
    statistic exists there) and SIGNAL_CERTAIN on an edge outlier.
    """
    s, a, b = _coeffs(omega, w2, fi)
    if s >= 1.0:
        return RELIABLY_DETECTABLE
    if isinstance(data, SpectrumResult):
        spec = data
        mu = spec.eigvals
        tr1, tr2 = float(mu.sum()), float((mu * mu).sum())
    else:
        spec = eigvals_sym(data)
        tr1, tr2 = traces(data)
    n = spec.n
    phi = phi_tilde(omega, w2, fi)
    direct = lss(phi, spec, nodes)
    if isinstance(direct, Outcome):
        return direct
    ld = log_det_shift(spec, s)
    if isinstance(ld, Outcome):
        return ld
    closed = -ld + 0.5 * s * n + a * tr1 + b * (tr2 - n)
    scale = max(1.0, abs(closed), abs(direct))
    if abs(closed - direct) > 1e-6 * scale:
        raise ArithmeticError(
            f"statistic paths disagree: closed={closed!r} direct={direct!r}"
        )
    return closed


def _gap_tilde(omega: float, w2: float, fi: FisherFunctionals) -> float:
    s = omega * fi.F
    return (
        -math.log1p(-s)
        + (2.0 * fi.F_d / w2 - fi.F) * omega
        + (fi.G**2 / (fi.w4_tilde - 1.0) - fi.F**2 / 2.0) * omega * omega
    )


def limiting_moments_tilde(
    omega: float, w2: float, fi: FisherFunctionals
) -> LimitingMoments:
    """Gaussian limits of L-tilde; v0 = 2 (m_plus - m0) exactly."""
    s, _, _ = _coeffs(omega, w2, fi)
    _require_subcritical(s)
    m0 = (
        -0.5 * math.log1p(-s)
        + ((w2 - 1.0) * fi.G / (fi.w4_tilde - 1.0) - fi.F / 2.0) * omega
        + (fi.w4_tilde - 3.0) * s * s / 4.0
    )
    gap = _gap_tilde(omega, w2, fi)
    return LimitingMoments(m0=m0, m_plus=m0 + gap, v0=2.0 * gap)


def critical_tilde(omega: float, w2: float, fi: FisherFunctionals) -> float:
    """Decision threshold for L-tilde; equals the midpoint of the means."""
    s, _, _ = _coeffs(omega, w2, fi)
    _require_subcritical(s)
    return (
        -math.log1p(-s)
        + (fi.F_d / w2 - fi.F + (w2 - 1.0) * fi.G / (fi.w4_tilde - 1.0)) * omega
        + (fi.w4_tilde / 4.0 - 1.0) * s * s
        + (omega * fi.G) ** 2 / (2.0 * (fi.w4_tilde - 1.0))
    )


def theoretical_error_tilde(omega: float, w2: float, fi: FisherFunctionals) -> float:
    """Limiting total error of the transformed test."""
    s, _, _ = _coeffs(omega, w2, fi)
    _require_subcritical(s)
    return erfc(math.sqrt(_gap_tilde(omega, w2, fi)) / 4.0)


def edge_threshold(effective_snr: float) -> float:
    """Top-eigenvalue threshold for effective SNR >= 1: midpoint between the
    bulk edge 2 and the outlier location sqrt(s) + 1/sqrt(s)."""
    if effective_snr < 1.0:
        raise ValueError("edge test applies only at effective SNR >= 1")
    r = math.sqrt(effective_snr)
    return 0.5 * (2.0 + r + 1.0 / r)


def clt_mean_transformed(
    f,
    lam: float,
    w2: float,
    fi: FisherFunctionals,
    ellmax: Optional[int] = None,
    nodes: int = DEFAULT_NODES,
) -> float:
    """Limiting mean of the centered spectral sum of f on the transformed
    matrix when the data carries a spike of size lam.

    The spike passes through the transform nonlinearly, so the first two
    series terms pick up F_d and G instead of plain powers of lam.
    """
    if lam < 0.0:
        raise ValueError("lambda must be nonnegative")
    s = lam * fi.F
    if s >= 1.0:
        raise ValueError("lambda * F must be below 1")
    if ellmax is None:
        ellmax = default_ellmax(s)
    t = cheb_coeffs(f, max(ellmax, 4), nodes).tau
    total = (
        (float(f(2.0)) + float(f(-2.0))) / 4.0
        - t[0] / 2.0
        + math.sqrt(lam * fi.F_d) * t[1]
        + (w2 - 2.0 + lam * fi.G) * t[2]
        + (fi.w4_tilde - 3.0) * t[4]
    )
    if t.size > 3 and s > 0.0:
        ells = np.arange(3, t.size)
        total += float(np.sum(s ** (ells / 2.0) * t[3:]))
    return total


def check_delocalization(x) -> bool:
    """True when the spike is spread out: max |x_i| <= n^(-3/8)."""
    v = np.asarray(x)
    n = v.size
    return bool(np.max(np.abs(v)) <= n ** (-0.375))

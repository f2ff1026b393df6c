"""Chebyshev expansion machinery for linear spectral statistics.

The coefficients are tau_l(f) = (1/pi) int_{-2}^2 T_l(x/2) f(x)/sqrt(4-x^2) dx.
Substituting x = 2 cos(theta) turns the weight into Lebesgue measure and
T_l into cos(l theta), so Gauss-Chebyshev quadrature is a plain average
over equispaced midpoint angles. The fluctuation of sum_i f(mu_i) around
its semicircle expectation is asymptotically Gaussian with mean and
variance given by short series in the tau_l; those series are what
clt_mean and clt_var evaluate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .spectral import SIGNAL_CERTAIN, SpectrumResult

__all__ = [
    "AnalyticFn",
    "ChebCoeffs",
    "CltMoments",
    "DEFAULT_NODES",
    "default_ellmax",
    "tau",
    "cheb_coeffs",
    "phi_omega",
    "clt_mean",
    "clt_var",
    "clt_moments",
    "semicircle_avg",
    "lss",
    "optimality_ratio",
]

DEFAULT_NODES = 2048


@dataclass(frozen=True)
class AnalyticFn:
    """A scalar function on an interval containing [-2, 2].

    eval must accept numpy arrays. domain, when set, is the open interval
    on which the function is defined; lss() uses it to detect eigenvalues
    the function cannot be evaluated at.
    """

    eval: Callable
    label: str = ""
    domain: Optional[tuple] = None

    def __call__(self, x):
        return self.eval(x)


@dataclass(frozen=True)
class ChebCoeffs:
    tau: np.ndarray
    ellmax: int
    nodes: int


@dataclass(frozen=True)
class CltMoments:
    mean: float
    variance: float
    lam: float
    w2: float
    w4: float
    complex: bool = False


def default_ellmax(lam: float) -> int:
    """Series length putting the geometric tail lambda^(l/2) below 1e-12."""
    if lam <= 0.0:
        return 50
    return max(50, math.ceil(math.log(1e-12) / math.log(math.sqrt(lam))))


def _angles(nodes: int) -> np.ndarray:
    if nodes < 64:
        raise ValueError("nodes must be at least 64")
    return (np.arange(nodes) + 0.5) * (np.pi / nodes)


def cheb_coeffs(f, ellmax: int, nodes: int = DEFAULT_NODES) -> ChebCoeffs:
    """tau_0 .. tau_ellmax by midpoint quadrature in theta.

    cos(l theta) is built by the three-term recurrence, so memory stays
    O(nodes) no matter how long the series is.
    """
    if ellmax < 0:
        raise ValueError("ellmax must be nonnegative")
    theta = _angles(nodes)
    fx = np.asarray(f(2.0 * np.cos(theta)), dtype=float)
    if not np.all(np.isfinite(fx)):
        raise ValueError("function is non-finite at a quadrature node")
    taus = np.empty(ellmax + 1)
    taus[0] = fx.mean()
    if ellmax >= 1:
        c_prev = np.ones_like(theta)
        c_cur = np.cos(theta)
        taus[1] = (c_cur * fx).mean()
        two_cos = 2.0 * c_cur
        for ell in range(2, ellmax + 1):
            c_prev, c_cur = c_cur, two_cos * c_cur - c_prev
            taus[ell] = (c_cur * fx).mean()
    taus.setflags(write=False)
    return ChebCoeffs(tau=taus, ellmax=ellmax, nodes=nodes)


def tau(f, ell: int, nodes: int = DEFAULT_NODES) -> float:
    """Single Chebyshev coefficient tau_ell(f)."""
    return float(cheb_coeffs(f, ell, nodes).tau[ell])


def phi_omega(omega: float, w2: float, w4: float, complex: bool = False) -> AnalyticFn:
    """The optimal test function at hypothesized SNR omega.

    log(1/(1 - sqrt(omega) x + omega)) plus linear and quadratic
    corrections whose coefficients depend on (w2, w4) and on whether the
    ensemble is real or complex. Defined for |x| < sqrt(omega)+1/sqrt(omega).
    """
    if not 0.0 < omega < 1.0:
        raise ValueError("omega must lie in (0, 1)")
    if w2 <= 0.0 or w4 <= 1.0:
        raise ValueError("need w2 > 0 and w4 > 1")
    r = math.sqrt(omega)
    if complex:
        a = r * (1.0 / w2 - 1.0)
        b = 0.5 * omega * (1.0 / (w4 - 1.0) - 1.0)
    else:
        a = r * (2.0 / w2 - 1.0)
        b = omega * (1.0 / (w4 - 1.0) - 0.5)
    bound = r + 1.0 / r

    def _eval(x):
        x = np.asarray(x, dtype=float)
        return -np.log1p(omega - r * x) + a * x + b * x * x

    kind = "complex" if complex else "real"
    return AnalyticFn(
        eval=_eval,
        label=f"phi[omega={omega:g}, w2={w2:g}, w4={w4:g}, {kind}]",
        domain=(-bound, bound),
    )


def _spike_shift(taus: np.ndarray, lam: float) -> float:
    if lam == 0.0:
        return 0.0
    ells = np.arange(1, taus.size)
    return float(np.sum(lam ** (ells / 2.0) * taus[1:]))


def clt_mean(
    f,
    lam: float,
    w2: float,
    w4: float,
    complex: bool = False,
    ellmax: Optional[int] = None,
    nodes: int = DEFAULT_NODES,
) -> float:
    """Limiting mean of the centered spectral sum of f at SNR lam."""
    if not 0.0 <= lam < 1.0:
        raise ValueError("lambda must lie in [0, 1)")
    if ellmax is None:
        ellmax = default_ellmax(lam)
    t = cheb_coeffs(f, max(ellmax, 4), nodes).tau
    shift = _spike_shift(t, lam)
    if complex:
        return (w2 - 1.0) * t[2] + (w4 - 2.0) * t[4] + shift
    boundary = (float(f(2.0)) + float(f(-2.0))) / 4.0
    return boundary - t[0] / 2.0 + (w2 - 2.0) * t[2] + (w4 - 3.0) * t[4] + shift


def _var_from_taus(t: np.ndarray, w2: float, w4: float, complex: bool) -> float:
    ells = np.arange(1, t.size)
    s = float(np.sum(ells * t[1:] ** 2))
    if complex:
        v = (w2 - 1.0) * t[1] ** 2 + 2.0 * (w4 - 2.0) * t[2] ** 2 + s
    else:
        v = (w2 - 2.0) * t[1] ** 2 + 2.0 * (w4 - 3.0) * t[2] ** 2 + 2.0 * s
    if v < -1e-10:
        raise ValueError("negative variance; check that w2 >= 0 and w4 >= 1")
    return max(v, 0.0)


def clt_var(
    f,
    w2: float,
    w4: float,
    complex: bool = False,
    ellmax: Optional[int] = None,
    nodes: int = DEFAULT_NODES,
) -> float:
    """Limiting variance of the centered spectral sum (SNR-independent)."""
    if ellmax is None:
        ellmax = 512
    t = cheb_coeffs(f, max(ellmax, 4), nodes).tau
    return _var_from_taus(t, w2, w4, complex)


def clt_moments(
    f,
    lam: float,
    w2: float,
    w4: float,
    complex: bool = False,
    ellmax: Optional[int] = None,
    nodes: int = DEFAULT_NODES,
) -> CltMoments:
    mean = clt_mean(f, lam, w2, w4, complex, ellmax, nodes)
    var = clt_var(f, w2, w4, complex, ellmax, nodes)
    return CltMoments(mean=mean, variance=var, lam=lam, w2=w2, w4=w4, complex=complex)


def semicircle_avg(f, nodes: int = DEFAULT_NODES) -> float:
    """int_{-2}^2 f(x) sqrt(4-x^2)/(2 pi) dx."""
    theta = _angles(nodes)
    vals = 2.0 * np.sin(theta) ** 2 * np.asarray(f(2.0 * np.cos(theta)), dtype=float)
    return float(vals.mean())


def lss(f, spec: SpectrumResult, nodes: int = DEFAULT_NODES):
    """sum_i f(mu_i) - n * semicircle_avg(f), or SIGNAL_CERTAIN.

    If f carries a domain and an eigenvalue falls outside it, the bulk
    cannot explain that eigenvalue and the distinguished outcome is
    returned instead of a number.
    """
    mu = spec.eigvals
    dom = getattr(f, "domain", None)
    if dom is not None and (mu[0] >= dom[1] or mu[-1] <= dom[0]):
        return SIGNAL_CERTAIN
    total = float(np.sum(np.asarray(f(mu), dtype=float)))
    return total - spec.n * semicircle_avg(f, nodes)


def optimality_ratio(
    f,
    omega: float,
    w2: float,
    w4: float,
    ellmax: Optional[int] = None,
    nodes: int = DEFAULT_NODES,
) -> float:
    """|sum_l omega^(l/2) tau_l(f)| / sqrt(V(f)) for the real ensemble.

    Maximized exactly by phi_omega (up to affine maps), where it equals
    sqrt(V0)/2.
    """
    if not 0.0 < omega < 1.0:
        raise ValueError("omega must lie in (0, 1)")
    if ellmax is None:
        ellmax = default_ellmax(omega)
    t = cheb_coeffs(f, max(ellmax, 4), nodes).tau
    v = _var_from_taus(t, w2, w4, complex=False)
    # quadrature roundoff alone produces v of order 1e-22
    if v <= 1e-16:
        raise ValueError("variance is zero; f is constant up to quadrature error")
    return abs(_spike_shift(t, omega)) / math.sqrt(v)

"""Choosing the hypothesized SNR t when the true SNR is unknown.

The test statistic is evaluated at a fixed t while the data carries an
arbitrary lambda, so the limiting mean interpolates between the null and
matched values. Averaging the resulting error over a prior on lambda and
minimizing over t gives the adaptive test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .lsstest import TestParams, limiting_moments
from .special import erfc

__all__ = [
    "SnrPrior",
    "AdaptiveResult",
    "mean_under_lambda",
    "average_error",
    "optimize_t",
]

_BRACKET = (1e-4, 1.0 - 1e-4)
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SnrPrior:
    """Prior on the true SNR lambda in [0, 1]."""

    kind: str
    lam: Optional[float] = None

    @staticmethod
    def uniform01() -> "SnrPrior":
        return SnrPrior("uniform01")

    @staticmethod
    def point(lam: float) -> "SnrPrior":
        if not 0.0 <= lam <= 1.0:
            raise ValueError("point prior needs lambda in [0, 1]")
        return SnrPrior("point", lam=lam)


@dataclass(frozen=True)
class AdaptiveResult:
    t_star: float
    error: float
    evaluations: int
    flagged: bool
    trace: tuple


def mean_under_lambda(t: float, lam: float, w2: float, w4: float) -> float:
    """Limiting mean of the statistic at hypothesized t when the data SNR
    is lam. Reduces to m0(t) at lam=0 and to m_plus(t) at lam=t."""
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    if w2 <= 0.0 or w4 <= 1.0:
        raise ValueError("need w2 > 0 and w4 > 1")
    r = math.sqrt(lam * t)
    return (
        -0.5 * math.log1p(-t)
        + ((w2 - 1.0) / (w4 - 1.0) - 0.5) * t
        + (w4 - 3.0) * t * t / 4.0
        - math.log1p(-r)
        + (2.0 / w2 - 1.0) * r
        + (1.0 / (w4 - 1.0) - 0.5) * lam * t
    )


def average_error(t: float, prior: SnrPrior, w2: float, w4: float) -> float:
    """Limiting total error of the test at t, averaged over the prior.

    Type-I plus the prior-weighted Type-II; the threshold is the midpoint
    between the null mean and the mean at the matched SNR lam = t.
    """
    m0 = mean_under_lambda(t, 0.0, w2, w4)
    m1 = mean_under_lambda(t, t, w2, w4)
    v0 = limiting_moments(TestParams(t, w2, w4)).v0
    s = 2.0 * math.sqrt(2.0 * v0)
    err = 0.5 * erfc((m1 - m0) / s)

    def type2(lam: float) -> float:
        return 0.5 * erfc((2.0 * mean_under_lambda(t, lam, w2, w4) - m1 - m0) / s)

    if prior.kind == "point":
        return err + type2(prior.lam)
    if prior.kind == "uniform01":
        panels = 512
        xs = np.linspace(0.0, 1.0 - 1e-9, panels + 1)
        ys = np.array([type2(x) for x in xs])
        h = (xs[-1] - xs[0]) / panels
        integral = (h / 3.0) * (
            ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-1:2].sum()
        )
        return err + float(integral)
    raise ValueError(f"unknown prior kind: {prior.kind!r}")


def optimize_t(
    prior: SnrPrior, w2: float, w4: float, tol: float = 1e-6
) -> AdaptiveResult:
    """Golden-section minimization of average_error over t.

    The reported optimum is the argmin over every evaluation, not just the
    final bracket midpoint. If the best point seen falls outside the
    current bracket three shrinks in a row (non-unimodal trace), the
    result is flagged but still returned.
    """
    tol = max(tol, 1e-6)
    trace = []

    def f(t: float) -> float:
        v = average_error(t, prior, w2, w4)
        trace.append((t, v))
        return v

    a, b = _BRACKET
    f(a)
    f(b)
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    consecutive = 0
    flagged = False
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        best_t, _ = min(trace, key=lambda p: p[1])
        if a <= best_t <= b:
            consecutive = 0
        else:
            consecutive += 1
            if consecutive >= 3:
                flagged = True
    t_star, err = min(trace, key=lambda p: p[1])
    return AdaptiveResult(
        t_star=t_star,
        error=err,
        evaluations=len(trace),
        flagged=flagged,
        trace=tuple(trace),
    )

"""Dilogarithm on [0, 1] and zeta(2)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

ZETA2 = math.pi**2 / 6.0


@dataclass(frozen=True)
class AccuracyContract:
    absolute_tolerance: float = 1e-14

    def __post_init__(self):
        if not 0.0 < self.absolute_tolerance <= 1e-10:
            raise ValueError("tolerance must lie in (0, 1e-10]")


DEFAULT_ACCURACY = AccuracyContract()


def zeta2() -> float:
    return ZETA2


def _dilog_series(x):
    total = 0.0
    term = x
    n = 1
    while term > 1e-18 * max(total, 1e-300) or n == 1:
        total += term / (n * n)
        n += 1
        term *= x
        if term == 0.0:
            break
    return total


def dilog(x: float) -> float:
    """Li_2(x) for 0 <= x <= 1.

    Power series on [0, 1/2], reflection Li2(x) = zeta(2) - ln x ln(1-x) - Li2(1-x)
    above it.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"dilog is only defined here on [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return ZETA2
    if x <= 0.5:
        return _dilog_series(x)
    y = 1.0 - x
    return ZETA2 - math.log(x) * math.log1p(-x) - _dilog_series(y)


def dilog_quadrature(x: float) -> float:
    """-int_0^x ln(1-t)/t dt by adaptive quadrature; an independent route to Li_2.

    With t = 1 - e^{-s} the integrand s e^{-s}/(1 - e^{-s}) is smooth up to x = 1.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"dilog is only defined here on [0, 1], got {x}")

    def f(s):
        return s * math.exp(-s) / -math.expm1(-s) if s > 0.0 else 1.0

    upper = math.inf if x == 1.0 else -math.log1p(-x)
    val, _ = integrate.quad(f, 0.0, upper, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val

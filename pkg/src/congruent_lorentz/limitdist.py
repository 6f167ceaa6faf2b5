"""Closed-form limiting repartition functions G_ell, their densities and pieces."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from .arith import prime_factors, totient
from .special import ZETA2, dilog

INV_ZETA2 = 1.0 / ZETA2
_QUAD = dict(epsabs=1e-13, epsrel=1e-13, limit=400)


@dataclass(frozen=True)
class CongruenceModulus:
    ell: int
    C: float = field(init=False)
    A: float = field(init=False)

    def __post_init__(self):
        if self.ell < 2:
            raise ValueError(f"modulus must be >= 2, got {self.ell}")
        c = totient(self.ell) / (ZETA2 * self.ell)
        for p in prime_factors(self.ell):
            c /= 1.0 - 1.0 / (p * p)
        a = INV_ZETA2 - 2.0 * c / self.ell
        if not (0.0 < c <= INV_ZETA2 and a >= 0.0):
            raise ArithmeticError(f"constants out of range for ell={self.ell}")
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "A", a)

    @property
    def tail_weight(self) -> float:
        """2 C(ell) / ell, the coefficient of the lambda >= 1 branch."""
        return 2.0 * self.C / self.ell


@lru_cache(maxsize=None)
def modulus(ell: int) -> CongruenceModulus:
    return CongruenceModulus(int(ell))


def constant_C(ell: int) -> float:
    return modulus(ell).C


def constant_A(ell: int) -> float:
    return modulus(ell).A


def _one_minus_lam_log_ratio(lam):
    # (1 - lam) ln(1/lam - 1), removable zero at lam = 1
    if lam == 1.0:
        return 0.0
    return (1.0 - lam) * (math.log1p(-lam) - math.log(lam))


def H2(lam: float) -> float:
    if not 0.5 <= lam <= 1.0:
        raise ValueError(f"H2 needs lambda in [1/2, 1], got {lam}")
    ln = math.log(lam)
    return (3.0 * lam - 2.0 + ZETA2 - ln * ln
            + 2.0 * _one_minus_lam_log_ratio(lam) - 2.0 * dilog(lam))


def _h3_series(x):
    # H3(1/x) = sum_k x^k / (k^2 (k+1))
    total, xk, k = 0.0, x, 1
    while xk > 1e-18:
        total += xk / (k * k * (k + 1))
        k += 1
        xk *= x
    return total


def H3(lam: float) -> float:
    if lam < 1.0:
        raise ValueError(f"H3 needs lambda >= 1, got {lam}")
    if lam >= 2.0:
        return _h3_series(1.0 / lam)
    if lam == 1.0:
        return ZETA2 - 1.0
    return dilog(1.0 / lam) - (lam - 1.0) * math.log((lam - 1.0) / lam) - 1.0


def H3_integral(lam: float) -> float:
    """int_0^1 (1-u)/u ln(lam/(lam-u)) du by quadrature."""
    if lam < 1.0:
        raise ValueError(f"H3 needs lambda >= 1, got {lam}")

    def f(u):
        if u == 0.0:
            return 1.0 / lam
        return (1.0 - u) / u * -math.log1p(-u / lam)

    return integrate.quad(f, 0.0, 1.0, **_QUAD)[0]


def _check_lambda(lam):
    if not lam > 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")


def G(ell: int, lam: float) -> float:
    """Limiting probability that eps * tau exceeds lam."""
    _check_lambda(lam)
    m = modulus(ell)
    if lam <= 0.5:
        return 1.0 - (INV_ZETA2 + m.A) * lam
    if lam <= 1.0:
        return 1.0 - lam * INV_ZETA2 + m.A * H2(lam)
    return m.tail_weight * H3(lam)


def _tail_density(lam):
    # -H3'(lam) = 1/lam + (1 - 1/lam) ln(1 - 1/lam)
    x = 1.0 / lam
    if lam >= 2.0:
        total, xk, k = 0.0, x * x, 2
        while xk > 1e-18:
            total += xk / (k * (k - 1))
            k += 1
            xk *= x
        return total
    return x + (1.0 - x) * math.log((lam - 1.0) / lam)


def g(ell: int, lam: float) -> float:
    """Density -dG/dlam; branch points take the left-hand formula (values agree)."""
    _check_lambda(lam)
    m = modulus(ell)
    if lam <= 0.5:
        return INV_ZETA2 + m.A
    if lam <= 1.0:
        r = 1.0 / lam - 1.0
        tail = 0.0 if r == 0.0 else 2.0 * r * math.log(r)
        return INV_ZETA2 + m.A * (-3.0 + 2.0 / lam - tail)
    return m.tail_weight * _tail_density(lam)


def G_limit(lam: float) -> float:
    """ell -> infinity limit: A -> 1/zeta(2), C/ell -> 0; zero on [1, inf)."""
    _check_lambda(lam)
    if lam <= 0.5:
        return 1.0 - 2.0 * INV_ZETA2 * lam
    if lam <= 1.0:
        return 1.0 - lam * INV_ZETA2 + INV_ZETA2 * H2(lam)
    return 0.0


def _tail_integral(c, lam):
    # int_c^1 (1-u)/u ln(lam/(1-u)) du in closed form
    if c >= 1.0:
        return 0.0
    w = 1.0 - c
    return (-math.log(lam) * (math.log(c) + w) - dilog(c) + ZETA2
            + w * math.log(w) - w)


def I1(lam: float) -> float:
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"I1 needs lambda in (0, 1], got {lam}")
    if lam >= 0.5:
        return math.log(lam) ** 2
    return (math.log1p(-lam) * math.log(lam)
            + dilog(1.0 - lam) - dilog(lam))


def I2(lam: float) -> float:
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"I2 needs lambda in (0, 1], got {lam}")
    return _tail_integral(max(lam, 1.0 - lam), lam)


def I1_integral(lam: float) -> float:
    """int_lam^1 (1/x) ln(1/max(lam, 1-x)) dx by quadrature."""
    def f(x):
        return -math.log(max(lam, 1.0 - x)) / x

    pts = [1.0 - lam] if lam < 1.0 - lam < 1.0 else None
    return integrate.quad(f, lam, 1.0, points=pts, **_QUAD)[0]


def I2_integral(lam: float) -> float:
    """int_{max(lam,1-lam)}^1 (1-x)/x ln(lam/(1-x)) dx by quadrature."""
    def f(x):
        w = 1.0 - x
        return 0.0 if w <= 0.0 else w / x * (math.log(lam) - math.log(w))

    return integrate.quad(f, max(lam, 1.0 - lam), 1.0, **_QUAD)[0]


def G1_partial(lam: float) -> float:
    _check_lambda(lam)
    if lam >= 1.0:
        return 0.0
    return I1(lam) + 2.0 * I2(lam)


def _log_kernel_integral(lo, hi):
    # int_lo^hi (1/u) ln(1/(1-u)) du, substituting u = 1 - e^{-t}
    if hi <= lo:
        return 0.0
    t_lo = -math.log1p(-lo)
    t_hi = math.inf if hi >= 1.0 else -math.log1p(-hi)

    def f(t):
        u = -math.expm1(-t)
        return t * math.exp(-t) / u if u > 0.0 else 1.0

    return integrate.quad(f, t_lo, t_hi, **_QUAD)[0]


def H1_bracket(lam: float) -> float:
    """lam - zeta(2) + I1 + 2 I2 on (0, 1/2), every integral by quadrature; equals -lam.

    I1 splits at 1 - lam into ln(lam) ln(1-lam) plus one copy of the
    log-kernel integral over [lam, 1-lam].
    """
    if not 0.0 < lam < 0.5:
        raise ValueError(f"H1 bracket needs lambda in (0, 1/2), got {lam}")
    return (lam - ZETA2 + math.log(lam) * math.log1p(-lam)
            + _log_kernel_integral(lam, 1.0 - lam) + 2.0 * I2_integral(lam))


def H1_reduced(lam: float) -> float:
    """-lam - ln(lam) ln(1-lam) + int_{1-lam}^1 - int_0^lam of the log kernel."""
    if not 0.0 < lam < 0.5:
        raise ValueError(f"H1 bracket needs lambda in (0, 1/2), got {lam}")
    return (-lam - math.log(lam) * math.log1p(-lam)
            + _log_kernel_integral(1.0 - lam, 1.0)
            - _log_kernel_integral(0.0, lam))


def H2_integral(lam: float) -> float:
    """H2 via 3lam - 2 - zeta(2) - ln^2 lam + 2(1-lam)ln(1/lam-1) + 2 int_lam^1 ..."""
    if not 0.5 <= lam <= 1.0:
        raise ValueError(f"H2 needs lambda in [1/2, 1], got {lam}")
    return (3.0 * lam - 2.0 - ZETA2 - math.log(lam) ** 2
            + 2.0 * _one_minus_lam_log_ratio(lam)
            + 2.0 * _log_kernel_integral(lam, 1.0))


@dataclass(frozen=True)
class LimitCurve:
    """G_ell and g_ell tabulated on a lambda grid."""

    modulus: CongruenceModulus
    lambdas: np.ndarray

    @classmethod
    def on_grid(cls, ell, lambdas):
        lambdas = np.asarray(lambdas, dtype=float)
        if lambdas.ndim != 1 or len(lambdas) < 2 or np.any(lambdas <= 0):
            raise ValueError("grid must hold at least two positive values")
        return cls(modulus(ell), lambdas)

    @property
    def G(self):
        return np.array([G(self.modulus.ell, x) for x in self.lambdas])

    @property
    def g(self):
        return np.array([g(self.modulus.ell, x) for x in self.lambdas])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "G", "g"])
        for lam, gv, dv in zip(self.lambdas, self.G, self.g):
            w.writerow([f"{lam:.17g}", f"{gv:.17g}", f"{dv:.17g}"])
        return buf.getvalue()


def tabulate(ell: int, lambdas) -> str:
    return LimitCurve.on_grid(ell, lambdas).to_csv()

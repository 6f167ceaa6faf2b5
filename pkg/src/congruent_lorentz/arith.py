"""Integer primitives and the congruence-restricted totient sums."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

SIEVE_BOUND = 10**7


class NoInverseError(ValueError):
    """Raised when a residue has no multiplicative inverse."""


class _Sieve:
    """Smallest-prime-factor table, grown on demand up to ``bound``."""

    def __init__(self, bound=SIEVE_BOUND):
        self.bound = bound
        self._spf = np.zeros(2, dtype=np.int32)
        self._lock = threading.Lock()

    def spf(self, n):
        if n >= len(self._spf):
            with self._lock:
                if n >= len(self._spf):
                    self._spf = _spf_table(max(n + 1, 2 * len(self._spf)))
        return self._spf

    def factor(self, n):
        """Prime factorisation as {p: e}."""
        out = {}
        if n <= self.bound:
            spf = self.spf(n)
            while n > 1:
                p = int(spf[n])
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out[p] = e
            return out
        p = 2
        while p * p <= n:
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
            p += 1 if p == 2 else 2
        if n > 1:
            out[n] = out.get(n, 0) + 1
        return out


def _spf_table(size):
    size = min(size, SIEVE_BOUND + 1)
    spf = np.zeros(size, dtype=np.int32)
    spf[1] = 1
    for p in range(2, math.isqrt(size - 1) + 1):
        if spf[p] == 0:
            block = spf[p * p::p]
            block[block == 0] = p
    rest = np.nonzero(spf == 0)[0]
    spf[rest] = rest
    return spf


_SIEVE = _Sieve()


def gcd(a: int, b: int) -> int:
    if a == 0 and b == 0:
        raise ValueError("gcd(0, 0) is undefined")
    return math.gcd(a, b)


def prime_factors(n: int) -> dict:
    if n < 1:
        raise ValueError(f"expected n >= 1, got {n}")
    return _SIEVE.factor(n)


def totient(n: int) -> int:
    result = n
    for p in prime_factors(n):
        result -= result // p
    return result


def mobius(n: int) -> int:
    fac = prime_factors(n)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def mod_inverse(a: int, m: int) -> int:
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    if m == 1:
        return 0
    try:
        return pow(a, -1, m)
    except ValueError:
        raise NoInverseError(f"{a} has no inverse modulo {m}") from None


def totient_table(n: int) -> np.ndarray:
    """phi(0..n) as an int64 array (phi(0) = 0)."""
    phi = np.arange(n + 1, dtype=np.int64)
    spf = _SIEVE.spf(n) if n <= SIEVE_BOUND else _spf_table(n + 1)
    primes = np.nonzero(spf[: n + 1] == np.arange(n + 1))[0]
    for p in primes[primes >= 2]:
        phi[p::p] -= phi[p::p] // p
    return phi


@dataclass
class SummandFunction:
    """A weight V on [0, N] with its sup-norm and total variation.

    Missing bounds are estimated on a uniform grid; ``func`` should accept
    numpy arrays (scalar-only callables are vectorised).
    """

    func: Callable
    N: float
    sup_norm: float | None = None
    total_variation: float | None = None
    grid_points: int = 10_001

    def __post_init__(self):
        if self.sup_norm is None or self.total_variation is None:
            xs = np.linspace(0.0, self.N, self.grid_points)
            vals = self(xs)
            if self.sup_norm is None:
                self.sup_norm = float(np.max(np.abs(vals)))
            if self.total_variation is None:
                self.total_variation = float(np.sum(np.abs(np.diff(vals))))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.func(x)
        if np.ndim(out) != np.ndim(x) or np.shape(out) != np.shape(x):
            out = np.vectorize(self.func, otypes=[float])(x)
        return np.asarray(out, dtype=float)

    def integral(self) -> float:
        tol = 1e-10 * self.N * max(self.sup_norm, 1e-300)
        val, _ = integrate.quad(lambda t: float(self(t)), 0.0, self.N,
                                epsabs=tol, epsrel=1e-12, limit=500)
        return val

    @classmethod
    def constant(cls, N, value=1.0):
        return cls(lambda x: np.full_like(x, value, dtype=float), N,
                   sup_norm=abs(value), total_variation=0.0)


@dataclass(frozen=True)
class TotientSum:
    exact_sum: float
    main_term: float
    residual: float


def _congruence_constant(ell):
    # local copy of C(ell) keeps arith free of a limitdist import cycle
    c = totient(ell) / ell * 6.0 / math.pi**2
    for p in prime_factors(ell):
        c /= 1.0 - 1.0 / p**2
    return c


def coprime_totient_sum(ell: int, N: int, V: SummandFunction) -> TotientSum:
    """sum_{k <= N, (k, ell) = 1} phi(k)/k V(k) against C(ell) * int_0^N V."""
    if ell < 2 or N < 1:
        raise ValueError("need ell >= 2 and N >= 1")
    k = np.arange(1, N + 1)
    phi = totient_table(N)[1:]
    keep = np.gcd(k, ell) == 1
    exact = float(np.sum(phi[keep] / k[keep] * V(k[keep])))
    main = _congruence_constant(ell) * V.integral()
    return TotientSum(exact, main, exact - main)


def scaled_totient_sum(ell: int, N: int, V: SummandFunction) -> TotientSum:
    """sum_{n <= N} phi(ell n)/n V(n) against ell C(ell) * int_0^N V."""
    if ell < 2 or N < 1:
        raise ValueError("need ell >= 2 and N >= 1")
    n = np.arange(1, N + 1)
    phi = totient_table(ell * N)
    exact = float(np.sum(phi[ell * n] / n * V(n)))
    main = ell * _congruence_constant(ell) * V.integral()
    return TotientSum(exact, main, exact - main)


@dataclass(frozen=True)
class EquidistributionCount:
    count: int
    prediction: float


def _integers_in(lo, hi):
    return range(math.ceil(lo), math.ceil(hi))


def inverse_equidistribution_check(q: int, h: int, box_i, box_j) -> EquidistributionCount:
    """Count (a, b) in box_i x box_j with ab = h mod q, gcd(b, q) = 1.

    Boxes are half-open real intervals (lo, hi). Each admissible b fixes
    a mod q, so the count enumerates b and counts the matching a.
    """
    (ilo, ihi), (jlo, jhi) = box_i, box_j
    count = 0
    for b in _integers_in(jlo, jhi):
        if math.gcd(b, q) != 1:
            continue
        r = (h * mod_inverse(b, q)) % q
        # a = r + t q inside [ilo, ihi)
        first = r + q * math.ceil((ilo - r) / q)
        if first < ihi:
            count += (math.ceil(ihi) - 1 - first) // q + 1
    prediction = totient(q) / q**2 * (ihi - ilo) * (jhi - jlo)
    return EquidistributionCount(count, prediction)

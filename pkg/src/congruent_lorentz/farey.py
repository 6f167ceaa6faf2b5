"""Farey fractions, slope bracketing, mediant chains and the pair sums."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from . import _kernels
from .limitdist import I1, I2, H3, modulus


class EndOfSequence(Exception):
    """The right end 1/1 of F_Q has no successor."""


class BoundarySlope(ValueError):
    """The slope sits exactly on a band boundary t_k or u_k."""


class BeyondHorizon(Exception):
    """The mediant chain index exceeds the caller's cap."""


@dataclass(frozen=True)
class ReducedFraction:
    a: int
    q: int

    def __post_init__(self):
        if self.q < 1 or not 0 <= self.a <= self.q:
            raise ValueError(f"need 0 <= a <= q, q >= 1; got {self.a}/{self.q}")
        if math.gcd(self.a, self.q) != 1:
            raise ValueError(f"{self.a}/{self.q} is not in lowest terms")

    @property
    def value(self) -> float:
        return self.a / self.q

    def __str__(self):
        return f"{self.a}/{self.q}"


@dataclass(frozen=True)
class FareyPair:
    left: ReducedFraction
    right: ReducedFraction
    order: int

    def __post_init__(self):
        l, r, Q = self.left, self.right, self.order
        if r.a * l.q - l.a * r.q != 1:
            raise ValueError(f"{l}, {r} are not Farey neighbours")
        if max(l.q, r.q) > Q or l.q + r.q <= Q:
            raise ValueError(f"{l}, {r} are not consecutive in F_{Q}")

    def t0(self, eps):
        return (self.right.a - eps) / self.right.q

    def u0(self, eps):
        return (self.left.a + eps) / self.left.q


@dataclass(frozen=True)
class MediantChain:
    """Fractions (k*a_s + a_o)/(k*q_s + q_o) accumulating at the sink a_s/q_s.

    ``side='left'`` has the sink on the left of the pair (the chain
    descends toward it from the right neighbour); ``'right'`` mirrors it.
    """

    pair: FareyPair
    side: str = "left"

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")

    @property
    def _sink_other(self):
        p = self.pair
        return (p.left, p.right) if self.side == "left" else (p.right, p.left)

    def a_k(self, k: int) -> int:
        s, o = self._sink_other
        return k * s.a + o.a

    def q_k(self, k: int) -> int:
        s, o = self._sink_other
        return k * s.q + o.q

    def gamma_k(self, k: int) -> float:
        return self.a_k(k) / self.q_k(k)

    def band_edge(self, k: int, eps: float) -> float:
        """t_k = (a_k - eps)/q_k on the left side, u_k = (a_k + eps)/q_k on the right."""
        if k == -1:
            s, o = self._sink_other
            return o.value
        shift = -eps if self.side == "left" else eps
        return (self.a_k(k) + shift) / self.q_k(k)


@dataclass(frozen=True)
class ChainExit:
    k: int
    q_exit: int
    a_exit: int


def enumerate_farey(Q: int, interval=(0.0, 1.0)) -> Iterator[ReducedFraction]:
    """Fractions of F_Q inside the closed interval, ascending."""
    if Q < 1:
        raise ValueError(f"order must be >= 1, got {Q}")
    lo, hi = interval
    a, b, c, d = 0, 1, 1, Q
    if lo <= 0.0 <= hi:
        yield ReducedFraction(0, 1)
    while c <= Q:
        if c > hi * d:
            return
        if c >= lo * d:
            yield ReducedFraction(c, d)
        k = (Q + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b


def next_in_sequence(pair: FareyPair) -> ReducedFraction:
    l, r, Q = pair.left, pair.right, pair.order
    if r.a == r.q:
        raise EndOfSequence(f"{r} ends F_{Q}")
    s = (Q + l.q) // r.q
    return ReducedFraction(s * r.a - l.a, s * r.q - l.q)


def bracket(x: float, Q: int) -> FareyPair:
    """Consecutive a/q <= x < a'/q' in F_Q by Stern-Brocot descent."""
    if not 0.0 <= x < 1.0:
        raise ValueError(f"slope must lie in [0, 1), got {x}")
    if Q < 1:
        raise ValueError(f"order must be >= 1, got {Q}")
    a, q, a2, q2 = _kernels.bracket(float(x), int(Q))
    return FareyPair(ReducedFraction(int(a), int(q)), ReducedFraction(int(a2), int(q2)), Q)


def in_congruence_class(f: ReducedFraction, ell: int, sign: int = 1) -> bool:
    """ell | (q - sign*a); sign=-1 is the class met after reflecting one axis."""
    return (f.q - sign * f.a) % ell == 0


def sink_chain_value(pair: FareyPair, x: float, eps: float, side: str = "left",
                     k_max: int | None = None) -> ChainExit:
    """Exit band of x on the mediant chain toward the sink of ``pair``.

    Left side: the k >= -1 with t_{k+1} < x <= t_k, exit at q_{k+1}.
    Right side: u_k <= x < u_{k+1} with u_{-1} = gamma, exit at q'_{k+1}.
    """
    chain = MediantChain(pair, side)
    sink, other = chain._sink_other
    if side == "left":
        den = x * sink.q - sink.a
        num = other.a - eps - x * other.q
    else:
        den = sink.a - x * sink.q
        num = x * other.q - other.a - eps
    if den <= 0.0:
        raise BeyondHorizon("slope lies on the sink itself")
    # first j with the ray inside band j: j >= num/den
    r = num / den
    if k_max is not None and r > k_max + 1:
        raise BeyondHorizon(f"chain index exceeds {k_max}")
    j = max(0, math.ceil(r))

    def inside(j):
        d = x * chain.q_k(j) - chain.a_k(j)
        return d >= -eps if side == "left" else d <= eps

    while j > 0 and inside(j - 1):
        j -= 1
    while not inside(j):
        j += 1
    if chain.band_edge(j, eps) == x:
        raise BoundarySlope(f"slope {x!r} equals a band edge")
    if k_max is not None and j - 1 > k_max:
        raise BeyondHorizon(f"chain index exceeds {k_max}")
    return ChainExit(j - 1, chain.q_k(j), chain.a_k(j))


@lru_cache(maxsize=4)
def farey_arrays(Q: int):
    """(numerators, denominators) of F_Q as int64 arrays; cached, read-only."""
    nums, dens = _kernels.farey_sequence(int(Q))
    nums.flags.writeable = False
    dens.flags.writeable = False
    return nums, dens


@dataclass(frozen=True)
class SumComparison:
    enumerated: float
    predicted: float

    @property
    def rel_err(self) -> float:
        if self.predicted == 0.0:
            return 0.0 if self.enumerated == 0.0 else math.inf
        return abs(self.enumerated - self.predicted) / abs(self.predicted)


def _pairs(interval, Q):
    nums, dens = farey_arrays(Q)
    a0, q0, a1, q1 = nums[:-1], dens[:-1], nums[1:], dens[1:]
    lo, hi = interval
    # pairs whose left member lies in I (the one straddling hi included)
    keep = (a0 >= lo * q0) & (a0 < hi * q0) if hi < 1.0 else (a0 >= lo * q0)
    return a0[keep], q0[keep], a1[keep], q1[keep]


def _check_sum_args(interval, Q, ell):
    lo, hi = interval
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError(f"interval must satisfy 0 <= x0 < x1 <= 1, got {interval}")
    if Q < 1 or Q > 10**4:
        raise ValueError(f"enumeration needs 1 <= Q <= 10^4, got {Q}")
    modulus(ell)
    return math.atan(hi) - math.atan(lo)


def _regular_pairs(interval, Q, ell):
    a0, q0, a1, q1 = _pairs(interval, Q)
    ok = ((q0 - a0) % ell != 0) & ((q1 - a1) % ell != 0)
    return a0[ok], q0[ok], a1[ok], q1[ok]


def sum_A(interval, Q: int, lam: float, ell: int, eps: float | None = None) -> SumComparison:
    c_I = _check_sum_args(interval, Q, ell)
    a0, q0, a1, q1 = _regular_pairs(interval, Q, ell)
    sel = np.minimum(q0, q1) > lam * Q
    g = a0[sel] / q0[sel]
    total = float(np.sum(1.0 / (q0[sel] * q1[sel].astype(float)) / (1.0 + g * g)))
    return SumComparison(total, c_I * modulus(ell).A * I1(min(lam, 1.0)))


def sum_B(interval, Q: int, lam: float, ell: int, eps: float | None = None) -> SumComparison:
    c_I = _check_sum_args(interval, Q, ell)
    eps = 1.0 / Q if eps is None else eps
    a0, q0, a1, q1 = _regular_pairs(interval, Q, ell)
    sel = (q0 <= lam * Q) & (q1 > lam * Q)
    g = a1[sel] / q1[sel]
    w = (1.0 - eps * q1[sel]) / (q0[sel] * q1[sel].astype(float))
    total = float(np.sum(w / (1.0 + g * g)))
    return SumComparison(total, c_I * modulus(ell).A * I2(min(lam, 1.0)))


def sum_C(interval, Q: int, lam: float, ell: int, eps: float | None = None) -> SumComparison:
    c_I = _check_sum_args(interval, Q, ell)
    eps = 1.0 / Q if eps is None else eps
    a0, q0, a1, q1 = _regular_pairs(interval, Q, ell)
    sel = (q1 <= lam * Q) & (q0 > lam * Q)
    g = a0[sel] / q0[sel]
    w = (1.0 - eps * q0[sel]) / (q0[sel] * q1[sel].astype(float))
    total = float(np.sum(w / (1.0 + g * g)))
    return SumComparison(total, c_I * modulus(ell).A * I2(min(lam, 1.0)))


def sum_sink(interval, Q: int, lam: float, ell: int, eps: float | None = None) -> SumComparison:
    """Left sinks gamma in F^(ell): (1 - eps q)/(q (K q + q')) / (1 + gamma^2)."""
    c_I = _check_sum_args(interval, Q, ell)
    if lam <= 1.0:
        raise ValueError(f"sink sum needs lambda > 1, got {lam}")
    eps = 1.0 / Q if eps is None else eps
    a0, q0, a1, q1 = _pairs(interval, Q)
    sel = (q0 - a0) % ell == 0
    a0, q0, q1 = a0[sel], q0[sel].astype(float), q1[sel].astype(float)
    K = np.maximum(np.floor((lam * Q - q1) / q0), 0.0)
    g = a0 / q0
    total = float(np.sum((1.0 - eps * q0) / (q0 * (K * q0 + q1)) / (1.0 + g * g)))
    m = modulus(ell)
    return SumComparison(total, c_I * m.C / ell * H3(lam))

"""Free path lengths among small scatterers at the points (m, n), m != n mod ell."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, sweep
from .farey import BeyondHorizon, bracket, in_congruence_class, sink_chain_value
from .limitdist import G, modulus

GEOMETRIES = ("segment", "disc")
DEFAULT_LAMBDA_MAX = 20.0


@dataclass(frozen=True)
class LatticeConfig:
    """Scatterer layout: modulus, radius (or half-length) and shape.

    ``sign`` selects the class q - sign*n != 0 mod ell met by slopes in
    [0, 1]; sign = -1 is what the quadrants with tan(omega) < 0 reduce to.
    """

    ell: int
    eps: float
    geometry: str = "disc"
    sign: int = 1

    def __post_init__(self):
        modulus(self.ell)
        if not 0.0 < self.eps < 0.5:
            raise ValueError(f"eps must lie in (0, 1/2), got {self.eps}")
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"geometry must be one of {GEOMETRIES}, got {self.geometry!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def Q(self) -> int:
        return int(math.floor(1.0 / self.eps))

    def eligible(self, m, n):
        return (m - self.sign * n) % self.ell != 0


@dataclass(frozen=True)
class PathSample:
    omega: float
    outcome: float
    hit: tuple | None = None

    def __post_init__(self):
        if math.isfinite(self.outcome) != (self.hit is not None):
            raise ValueError("a hit point goes with a finite outcome and only then")

    @property
    def escaped(self) -> bool:
        return not math.isfinite(self.outcome)

    def to_json(self) -> str:
        out = "inf" if self.escaped else self.outcome
        return json.dumps({"outcome": out, "hit": list(self.hit) if self.hit else None})


def _fmt(x):
    return "inf" if x == math.inf else f"{x:.17g}"


@dataclass
class DistributionTable:
    """Empirical survival function of eps*tau against a theory curve."""

    lambdas: np.ndarray
    empirical: np.ndarray
    theory: np.ndarray
    n_samples: int
    seed: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lambdas = np.asarray(self.lambdas, dtype=float)
        self.empirical = np.asarray(self.empirical, dtype=float)
        self.theory = np.asarray(self.theory, dtype=float)
        if not (len(self.lambdas) == len(self.empirical) == len(self.theory)):
            raise ValueError("columns differ in length")
        if np.any(np.diff(self.lambdas) <= 0):
            raise ValueError("lambda grid must be strictly ascending")

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.empirical - self.theory)

    @property
    def sup_error(self) -> float:
        return float(np.max(self.abs_err))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "empirical", "theory", "abs_err"])
        for row in zip(self.lambdas, self.empirical, self.theory, self.abs_err):
            w.writerow([_fmt(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, n_samples: int, seed: int, meta=None):
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty table")
        col = {k: np.array([float(r[k]) for r in rows]) for k in rows[0]}
        return cls(col["lambda"], col["empirical"], col["theory"], n_samples, seed,
                   dict(meta or {}))

    def sidecar(self, **extra) -> dict:
        out = dict(self.meta)
        out.update(n_samples=self.n_samples, seed=self.seed, sup_error=self.sup_error)
        out.update(extra)
        return out


# --- horizontal (vertical-segment) model -------------------------------------

_BRUTE_CHUNK = 1 << 16


def horizontal_free_path_brute(cfg: LatticeConfig, slope: float, q_max: int) -> PathSample:
    """Smallest q <= q_max with an eligible n, |q*slope - n| <= eps, by direct scan."""
    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    for start in range(1, q_max + 1, _BRUTE_CHUNK):
        q = np.arange(start, min(start + _BRUTE_CHUNK, q_max + 1), dtype=np.int64)
        n = np.rint(q * slope).astype(np.int64)
        ok = (np.abs(q * slope - n) <= cfg.eps) & cfg.eligible(q, n)
        idx = np.flatnonzero(ok)
        if len(idx):
            i = idx[0]
            return PathSample(slope, float(q[i]), (int(q[i]), int(n[i])))
    return PathSample(slope, math.inf)


def horizontal_free_path_farey(cfg: LatticeConfig, slope: float,
                               lambda_max: float = DEFAULT_LAMBDA_MAX) -> PathSample:
    """The same quantity from the Farey neighbours of the slope in F_Q."""
    if not 0.0 <= slope <= 1.0:
        raise ValueError(f"slope must lie in [0, 1], got {slope}")
    eps, ell, s = cfg.eps, cfg.ell, cfg.sign
    Q = cfg.Q
    q_cap = int(lambda_max * Q)
    if slope == 1.0:
        # the diagonal: only q = n can come within eps < 1/2
        if (1 - s) % ell != 0:
            return PathSample(slope, 1.0, (1, 1))
        return PathSample(slope, math.inf)
    pair = bracket(slope, Q)
    left, right = pair.left, pair.right
    lsink = in_congruence_class(left, ell, s)
    rsink = in_congruence_class(right, ell, s)
    if not (lsink or rsink):
        hit_left = slope <= pair.u0(eps)
        hit_right = slope >= pair.t0(eps)
        if hit_left and (not hit_right or left.q < right.q):
            q, n = left.q, left.a
        elif hit_right:
            q, n = right.q, right.a
        else:
            return horizontal_free_path_brute(cfg, slope, q_cap)
    else:
        side, sink = ("left", left) if lsink else ("right", right)
        try:
            ex = sink_chain_value(pair, slope, eps, side, k_max=q_cap // sink.q + 1)
        except BeyondHorizon:
            return PathSample(slope, math.inf)
        q, n = ex.q_exit, ex.a_exit
    if q > q_cap:
        return PathSample(slope, math.inf)
    return PathSample(slope, float(q), (q, n))


def horizontal_free_path_fast(cfg: LatticeConfig, slope: float,
                              lambda_max: float = DEFAULT_LAMBDA_MAX) -> PathSample:
    """Compiled Farey path (the sweep kernel) for a single slope."""
    q, n = _kernels.horizontal_hit(float(slope), cfg.eps, cfg.ell, cfg.sign,
                                   int(lambda_max * cfg.Q))
    if q < 0:
        return PathSample(slope, math.inf)
    return PathSample(slope, float(q), (int(q), int(n)))


# --- disc model ---------------------------------------------------------------

_MARCH_CHUNK = 4096


def _march(cfg, major, minor, path_max):
    # columns k = 1, 2, ... along the major axis; direction (major, minor) unit
    k_last = int(path_max * abs(major)) + 2
    slope = minor / abs(major)
    step = 1 if major > 0 else -1
    for start in range(1, k_last + 1, _MARCH_CHUNK):
        k = np.arange(start, min(start + _MARCH_CHUNK, k_last + 1), dtype=np.int64)
        m = step * k
        base = np.floor(k * slope).astype(np.int64)
        best = None
        for n in (base, base + 1):
            d = np.abs(m * minor - n * major)
            ok = (d <= cfg.eps) & cfg.eligible(m, n)
            idx = np.flatnonzero(ok)
            if len(idx):
                i = idx[0]
                p = m[i] * major + n[i] * minor
                tau = p - math.sqrt(max(cfg.eps**2 - d[i] ** 2, 0.0))
                if best is None or tau < best[0]:
                    best = (tau, int(m[i]), int(n[i]))
        if best is not None:
            return best
    return None


def exit_time_disc_march(cfg: LatticeConfig, omega: float,
                         lambda_max: float = DEFAULT_LAMBDA_MAX) -> PathSample:
    """First disc met by the ray, by marching lattice columns (or rows)."""
    path_max = lambda_max / cfg.eps
    c, s = math.cos(omega), math.sin(omega)
    if abs(c) >= abs(s):
        found = _march(cfg, c, s, path_max)
    else:
        # (m, n) <-> (n, m) keeps the class m != n mod ell
        found = _march(cfg, s, c, path_max)
        if found is not None:
            found = (found[0], found[2], found[1])
    if found is None or found[0] > path_max:
        return PathSample(omega, math.inf)
    return PathSample(omega, float(found[0]), (found[1], found[2]))


def exit_time_disc(cfg: LatticeConfig, omega: float,
                   lambda_max: float = DEFAULT_LAMBDA_MAX) -> PathSample:
    """Free path from the origin to the first disc of radius eps.

    Exact: the direction is folded to slope in [0, 1] and the equivalent
    segment problem is solved through Farey neighbours.
    """
    if cfg.sign != 1:
        raise ValueError("the disc model uses the plain class m != n mod ell")
    tau, m, n = _kernels.disc_hit(float(omega), cfg.eps, cfg.ell, lambda_max / cfg.eps)
    if not math.isfinite(tau):
        return PathSample(omega, math.inf)
    return PathSample(omega, tau, (int(m), int(n)))


# --- empirical repartition ------------------------------------------------------

def _lambda_max(lambdas, lambda_max):
    return 4.0 * float(np.max(lambdas)) if lambda_max is None else lambda_max


def empirical_P(cfg: LatticeConfig, lambdas, n_samples: int, seed: int = sweep.DEFAULT_SEED,
                workers: int = 1, lambda_max: float | None = None) -> DistributionTable:
    """Fraction of stratified directions in [0, 2pi) with eps*tau > lambda."""
    lambdas = np.asarray(lambdas, dtype=float)
    lmax = _lambda_max(lambdas, lambda_max)
    eps, ell = cfg.eps, cfg.ell

    def kernel(omegas):
        out = np.empty_like(omegas)
        _kernels.sweep_disc(omegas, eps, ell, lmax / eps, out)
        return out

    sampler = sweep.StratifiedSampler(n_samples, seed)
    counts = sweep.run(sampler, kernel, lambdas, workers)
    theory = np.array([G(ell, x) for x in lambdas])
    return DistributionTable(lambdas, counts / n_samples, theory, n_samples, seed,
                             {"ell": ell, "epsilon": eps})


def empirical_sector_G(cfg: LatticeConfig, interval, lambdas, n_samples: int,
                       seed: int = sweep.DEFAULT_SEED, workers: int = 1,
                       lambda_max: float | None = None) -> DistributionTable:
    """Measure of omega in arctan(I) with eps*q(omega) > lambda, against c_I G."""
    x0, x1 = interval
    if not 0.0 <= x0 < x1 <= 1.0:
        raise ValueError(f"slope interval must lie in [0, 1], got {interval}")
    lambdas = np.asarray(lambdas, dtype=float)
    lmax = _lambda_max(lambdas, lambda_max)
    eps, ell, s = cfg.eps, cfg.ell, cfg.sign
    q_max = int(lmax * cfg.Q)

    def kernel(omegas):
        out = np.empty_like(omegas)
        _kernels.sweep_horizontal(np.minimum(np.tan(omegas), 1.0), eps, ell, s, q_max, out)
        return eps * out

    lo, hi = math.atan(x0), math.atan(x1)
    sampler = sweep.StratifiedSampler(n_samples, seed, lo, hi)
    counts = sweep.run(sampler, kernel, lambdas, workers)
    c_I = hi - lo
    theory = np.array([c_I * G(ell, x) for x in lambdas])
    return DistributionTable(lambdas, c_I * counts / n_samples, theory, n_samples, seed,
                             {"ell": ell, "epsilon": eps, "interval": [x0, x1]})

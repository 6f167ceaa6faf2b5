"""Hexagonal and square billiards with corner pockets, started at the centre.

Two independent engines: direct specular reflection inside the table, and
straight lines in the unfolded plane, where the pockets become discs on a
lattice with a congruence constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, sweep
from .freepath import DEFAULT_LAMBDA_MAX, DistributionTable, PathSample
from .limitdist import G

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SHAPES = ("hex", "square")


@dataclass(frozen=True)
class BilliardTable:
    """Regular hexagon of circumradius 1 (vertex on the +x axis) or the unit square.

    Coordinates are centred at the start point. Edge j has outward normal
    at angle phi0 + j*2pi/N, which is what the reflection table assumes.
    """

    shape: str
    eps: float
    vertices: np.ndarray = field(init=False, repr=False)
    normals: np.ndarray = field(init=False, repr=False)
    apothem: float = field(init=False)
    base: int = field(init=False)

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"shape must be one of {SHAPES}, got {self.shape!r}")
        if not 0.0 < self.eps < 0.25:
            raise ValueError(f"pocket radius must lie in (0, 1/4), got {self.eps}")
        if self.shape == "hex":
            nv, phi0, circ, apothem = 6, math.pi / 6.0, 1.0, SQRT3 / 2.0
        else:
            nv, phi0, circ, apothem = 4, 0.0, SQRT2 / 2.0, 0.5
        step = 2.0 * math.pi / nv
        ang = phi0 + step * np.arange(nv)
        normals = np.column_stack([np.cos(ang), np.sin(ang)])
        verts = circ * np.column_stack([np.cos(ang - step / 2), np.sin(ang - step / 2)])
        # snap the rounding noise: (+-1/2, +-1/2) and the hexagon's zero ordinates
        verts[np.abs(verts) < 1e-15] = 0.0
        if self.shape == "square":
            verts = np.round(verts * 2.0) / 2.0
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "apothem", apothem)
        # heading s*w + m*step reflected in wall j becomes -s*w + (base + 2j - m)*step
        object.__setattr__(self, "base", int(round((math.pi + 2 * phi0) / step)))

    @property
    def n_sides(self) -> int:
        return len(self.vertices)

    @property
    def side_length(self) -> float:
        return float(np.hypot(*(self.vertices[1] - self.vertices[0])))

    def max_bounces(self, path_max: float) -> int:
        """Upper bound on wall hits along a pocket-free path of length path_max.

        Between two wall hits the path either crosses the table or cuts a
        corner outside its pocket; the shortest corner cut has length
        2*eps*tan(alpha/2) for interior angle alpha.
        """
        alpha = math.pi * (1.0 - 2.0 / self.n_sides)
        return int(math.ceil(path_max / (2.0 * self.eps * math.tan(alpha / 2)))) + 1


def reflective_exit_time(table: BilliardTable, omega: float,
                         lambda_max: float = DEFAULT_LAMBDA_MAX) -> PathSample:
    """Arc length until the reflected trajectory first touches a pocket."""
    path_max = lambda_max / table.eps
    v, nrm = table.vertices, table.normals
    tau, pocket, _ = _kernels.polygon_billiard(
        v[:, 0].copy(), v[:, 1].copy(), nrm[:, 0].copy(), nrm[:, 1].copy(),
        table.apothem, table.base, float(omega), table.eps, path_max,
        table.max_bounces(path_max))
    if math.isnan(tau):
        raise RuntimeError(f"bounce guard exceeded at omega={omega!r}")
    if not math.isfinite(tau):
        return PathSample(omega, math.inf)
    return PathSample(omega, tau, (int(pocket),))


def unfolded_exit_time_hex(eps: float, omega: float,
                           lambda_max: float = DEFAULT_LAMBDA_MAX) -> PathSample:
    """First disc at a honeycomb vertex m(1,0) + n(1/2, sqrt3/2), m != n mod 3."""
    tau, m, n = _kernels.hex_hit(float(omega), eps, lambda_max / eps)
    if not math.isfinite(tau):
        return PathSample(omega, math.inf)
    return PathSample(omega, tau, (int(m), int(n)))


def unfolded_exit_time_square(eps: float, omega: float,
                              lambda_max: float = DEFAULT_LAMBDA_MAX) -> PathSample:
    """First disc at an integer point seen from (1/2, 1/2); hit is that point.

    (x, y) -> (x + y, y - x) takes the half-odd offsets onto the points
    (m, n) with m != n mod 2, stretching lengths by sqrt(2).
    """
    tau, m, n = _kernels.disc_hit(float(omega) - math.pi / 4.0, eps * SQRT2, 2,
                                  lambda_max / eps * SQRT2)
    if not math.isfinite(tau):
        return PathSample(omega, math.inf)
    # offsets ((m - n)/2, (m + n)/2) from the start point
    return PathSample(omega, tau / SQRT2, ((m - n + 1) // 2, (m + n + 1) // 2))


def unfolded_exit_time_square_march(eps: float, omega: float,
                                    lambda_max: float = DEFAULT_LAMBDA_MAX) -> PathSample:
    """Direct column march from (1/2, 1/2) over integer corner points; slow oracle."""
    path_max = lambda_max / eps
    c, s = math.cos(omega), math.sin(omega)
    swap = abs(s) > abs(c)
    major, minor = (s, c) if swap else (c, s)
    step = 1 if major > 0 else -1
    slope = minor / abs(major)
    k_last = int(path_max * abs(major)) + 2
    for start in range(0, k_last + 1, 4096):
        k = np.arange(start, min(start + 4096, k_last + 1), dtype=np.int64)
        dx = step * (k + 0.5)  # corner columns at half-odd offsets
        base = np.floor((k + 0.5) * slope - 0.5).astype(np.int64)
        best = None
        for j in (base, base + 1):
            dy = j + 0.5
            d = np.abs(dx * minor - dy * major)
            idx = np.flatnonzero(d <= eps)
            if len(idx):
                i = idx[0]
                p = dx[i] * major + dy[i] * minor
                tau = p - math.sqrt(max(eps * eps - d[i] ** 2, 0.0))
                corner = (int(step * k[i] + (1 if step > 0 else 0)), int(j[i] + 1))
                if best is None or tau < best[0]:
                    best = (float(tau), corner)
        if best is not None:
            if best[0] > path_max:
                break
            tau, (cx, cy) = best
            return PathSample(omega, tau, (cy, cx) if swap else (cx, cy))
    return PathSample(omega, math.inf)


# --- the honeycomb to Z^2_(3) change of coordinates -----------------------------

@dataclass(frozen=True)
class UnfoldingMap:
    """T(x, y) = (x - y/sqrt3, 2y/sqrt3) and the slope map Phi(mu) = mu sqrt3/(2 + mu)."""

    @staticmethod
    def T(p):
        x, y = p
        return (x - y / SQRT3, 2.0 * y / SQRT3)

    @staticmethod
    def T_inv(p):
        x, y = p
        return (x + y / 2.0, y * SQRT3 / 2.0)

    @staticmethod
    def phi(mu):
        if not 0.0 <= mu <= 1.0:
            raise ValueError(f"phi is defined on [0, 1], got {mu}")
        return mu * SQRT3 / (2.0 + mu)

    @staticmethod
    def phi_inv(x):
        if not 0.0 <= x <= 1.0 / SQRT3 + 1e-15:
            raise ValueError(f"phi_inv is defined on [0, 1/sqrt3], got {x}")
        return 2.0 * x / (SQRT3 - x)


transform_T = UnfoldingMap.T
transform_T_inv = UnfoldingMap.T_inv
phi = UnfoldingMap.phi
phi_inv = UnfoldingMap.phi_inv


def sine_rule_path(q: float, omega: float) -> float:
    """Length along direction omega in [0, pi/6] to horizontal index q of the honeycomb."""
    if not 0.0 <= omega <= math.pi / 6.0 + 1e-15:
        raise ValueError(f"omega must lie in [0, pi/6], got {omega}")
    return SQRT3 / 2.0 * q / math.cos(math.pi / 6.0 + omega)


# --- empirical repartition ---------------------------------------------------------

def hex_theory(lam):
    return G(3, 2.0 * lam / SQRT3)


def square_theory(lam):
    return G(2, lam / SQRT2)


def square_rescaled_theory(lam):
    """G_2(2 lambda): what the sqrt(2) dilation of the unfolded square predicts."""
    return G(2, 2.0 * lam)


def _cross_check(table, sampler, n_check, lmax):
    omegas = sampler.directions(0)[:n_check]
    unfold = unfolded_exit_time_hex if table.shape == "hex" else unfolded_exit_time_square
    worst = 0.0
    for w in omegas:
        a = unfold(table.eps, w, lmax).outcome
        b = reflective_exit_time(table, w, lmax).outcome
        if math.isfinite(a) != math.isfinite(b):
            return math.inf
        if math.isfinite(a):
            worst = max(worst, abs(a - b))
    return worst


def _empirical_table(shape, eps, lambdas, n, seed, workers, lambda_max, n_check):
    lambdas = np.asarray(lambdas, dtype=float)
    lmax = 4.0 * float(np.max(lambdas)) if lambda_max is None else lambda_max
    table = BilliardTable(shape, eps)
    path_max = lmax / eps

    if shape == "hex":
        def kernel(omegas):
            out = np.empty_like(omegas)
            _kernels.sweep_hex(omegas, eps, path_max, out)
            return out
        theory = np.array([hex_theory(x) for x in lambdas])
    else:
        def kernel(omegas):
            out = np.empty_like(omegas)
            _kernels.sweep_square(omegas, eps, path_max, out)
            return out
        theory = np.array([square_theory(x) for x in lambdas])

    sampler = sweep.StratifiedSampler(n, seed)
    counts = sweep.run(sampler, kernel, lambdas, workers)
    emp = counts / n
    meta = {"table": shape, "epsilon": eps}
    if shape == "square":
        alt = np.array([square_rescaled_theory(x) for x in lambdas])
        meta["sup_error_vs_G2_2lambda"] = float(np.max(np.abs(emp - alt)))
    if n_check:
        meta["fold_unfold_max_diff"] = _cross_check(table, sampler, min(n_check, n), lmax)
    return DistributionTable(lambdas, emp, theory, n, seed, meta)


def empirical_P_hex(eps: float, lambdas, n: int, seed: int = sweep.DEFAULT_SEED,
                    workers: int = 1, lambda_max: float | None = None,
                    n_check: int = 200) -> DistributionTable:
    """Survival of eps*tau in the hexagon against G_3(2 lambda/sqrt3)."""
    return _empirical_table("hex", eps, lambdas, n, seed, workers, lambda_max, n_check)


def empirical_P_square(eps: float, lambdas, n: int, seed: int = sweep.DEFAULT_SEED,
                       workers: int = 1, lambda_max: float | None = None,
                       n_check: int = 200) -> DistributionTable:
    """Survival of eps*tau in the square against G_2(lambda/sqrt2).

    The sidecar also carries the sup-error against G_2(2 lambda).
    """
    return _empirical_table("square", eps, lambdas, n, seed, workers, lambda_max, n_check)

"""Named self-check suites behind the ``verify`` subcommand."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, farey, limitdist
from .arith import SummandFunction, coprime_totient_sum, scaled_totient_sum
from .billiards import (BilliardTable, reflective_exit_time, unfolded_exit_time_hex,
                        unfolded_exit_time_square)
from .freepath import LatticeConfig, horizontal_free_path_brute, horizontal_free_path_farey
from .special import ZETA2, dilog

SUITES = ("identities", "farey", "sums", "billiards", "all")
LEMMA_K = 60.0


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {self.detail}"


def _within(name, err, tol):
    return Check(name, bool(err <= tol), f"err={err:.3g} tol={tol:g}")


def identities():
    yield _within("dilog(1/2)", abs(dilog(0.5) - (ZETA2 - math.log(2) ** 2) / 2), 1e-14)
    yield _within("dilog(1)", abs(dilog(1.0) - math.pi**2 / 6), 1e-15)
    h = 1e-8
    for b in (0.5, 1.0):
        worst = max(abs(limitdist.G(l, b - h) - limitdist.G(l, b + h)) for l in range(2, 13))
        yield _within(f"G continuity at {b:g}", worst, 10 * h)
        worst = max(abs(limitdist.g(l, b - 1e-12) - limitdist.g(l, b + 1e-12))
                    for l in range(2, 13))
        yield _within(f"g continuity at {b:g}", worst, 1e-9)
    lams = np.linspace(0.01, 0.49, 20)
    yield _within("H1 bracket = -lambda",
                  max(abs(limitdist.H1_bracket(x) + x) for x in lams), 1e-8)
    worst = 0.0
    for ell in (2, 3, 4):
        m = limitdist.modulus(ell)
        for x in np.linspace(0.02, 1.0, 50):
            lhs = m.A * limitdist.G1_partial(x) + m.tail_weight * (ZETA2 - x)
            worst = max(worst, abs(lhs - limitdist.G(ell, x)))
    yield _within("assembly identity", worst, 1e-9)


def farey_checks(Q=300, ells=(2, 3, 4, 5), n_queries=1000, Q_bracket=10**4, seed=1):
    bad = 0
    for order in range(1, Q + 1):
        a, q = farey.farey_arrays(order)
        det = a[1:] * q[:-1] - a[:-1] * q[1:]
        bad += int(np.sum(det != 1) + np.sum(q[1:] + q[:-1] <= order) + np.sum(q > order))
        for ell in ells:
            s = (q - a) % ell == 0
            bad += int(np.sum(s[1:] & s[:-1]))
    farey.farey_arrays.cache_clear()
    yield Check(f"consecutive pairs, Q <= {Q}", bad == 0, f"violations={bad}")
    xs = np.sort(np.random.default_rng(seed).random(n_queries))
    ref = _kernels.brackets_by_scan(xs, Q_bracket)
    mism = sum(_kernels.bracket(x, Q_bracket) != tuple(r) for x, r in zip(xs, ref))
    yield Check(f"bracket vs scan, Q={Q_bracket}", mism == 0, f"mismatches={mism}/{n_queries}")
    rng = np.random.default_rng(seed)
    for ell in (2, 3, 5):
        for eps in (1e-2, 1e-3):
            cfg = LatticeConfig(ell, eps, "segment")
            q_max = int(20 * cfg.Q)
            mism = 0
            for x in rng.random(200):
                if horizontal_free_path_farey(cfg, x) != horizontal_free_path_brute(cfg, x, q_max):
                    mism += 1
            yield Check(f"farey path vs brute, ell={ell} eps={eps:g}", mism == 0,
                        f"mismatches={mism}/200")


def lemma_checks(ells=(2, 3, 6), Ns=(10**3, 10**4, 10**5)):
    for ell in ells:
        for N in Ns:
            V = SummandFunction.constant(N)
            r1 = abs(coprime_totient_sum(ell, N, V).residual)
            r2 = abs(scaled_totient_sum(ell, N, V).residual)
            bound = LEMMA_K * math.log(N)
            yield Check(f"totient sums ell={ell} N={N}", r1 <= bound and r2 <= bound,
                        f"|r1|={r1:.3g} |r2|={r2:.3g} bound={bound:.3g}")


SUM_HEADER = "sum,Q,lambda,ell,enumerated,predicted,rel_err"


def sum_rows(Q=2000, ells=(2, 3)):
    for ell in ells:
        for lam in (0.4, 0.6, 0.8):
            for name, fn in (("A", farey.sum_A), ("B", farey.sum_B), ("C", farey.sum_C)):
                yield name, Q, lam, ell, fn((0.0, 1.0), Q, lam, ell)
        for lam in (1.2, 1.5, 2.0):
            yield "sink", Q, lam, ell, farey.sum_sink((0.0, 1.0), Q, lam, ell)


def sums(Q=2000, tol=0.05, rows=None):
    for name, Q, lam, ell, res in sum_rows(Q):
        if rows is not None:
            rows.append(f"{name},{Q},{lam:g},{ell},{res.enumerated:.12g},"
                        f"{res.predicted:.12g},{res.rel_err:.6g}")
        yield _within(f"sum_{name} Q={Q} lambda={lam:g} ell={ell}", res.rel_err, tol)
    yield from lemma_checks()


def billiards(eps=1e-3, n=1000, seed=3):
    omegas = np.random.default_rng(seed).random(n) * 2 * math.pi
    for shape, unfold in (("hex", unfolded_exit_time_hex), ("square", unfolded_exit_time_square)):
        table = BilliardTable(shape, eps)
        worst = 0.0
        for w in omegas:
            a = unfold(eps, w).outcome
            b = reflective_exit_time(table, w).outcome
            if math.isfinite(a) != math.isfinite(b):
                worst = math.inf
                break
            if math.isfinite(a):
                worst = max(worst, abs(a - b))
        yield _within(f"fold/unfold {shape}", worst, 1e-9)


def run_suite(name, Q=2000, rows=None):
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    parts = {
        "identities": lambda: identities(),
        "farey": lambda: farey_checks(),
        "sums": lambda: sums(Q, rows=rows),
        "billiards": lambda: billiards(),
    }
    names = list(parts) if name == "all" else [name]
    for n in names:
        yield from parts[n]()

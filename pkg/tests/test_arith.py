import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from congruent_lorentz.arith import (NoInverseError, SummandFunction, coprime_totient_sum,
                                     gcd, inverse_equidistribution_check, mobius, mod_inverse,
                                     prime_factors, scaled_totient_sum, totient, totient_table)


def test_gcd():
    assert gcd(0, 7) == 7 and gcd(12, 18) == 6 and gcd(1, 1) == 1
    with pytest.raises(ValueError):
        gcd(0, 0)


def test_totient_examples():
    assert totient(1) == 1 and totient(12) == 4
    assert all(totient(p) == p - 1 for p in (2, 3, 5, 7, 9973))


def test_totient_brute_and_table():
    phi = totient_table(500)
    for n in range(1, 501):
        brute = sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
        assert totient(n) == brute == phi[n]


def test_totient_multiplicative():
    phi = totient_table(250_000)
    for m in range(1, 501, 7):
        for n in range(1, 501, 3):
            if math.gcd(m, n) == 1:
                assert phi[m * n] == phi[m] * phi[n]


def test_large_argument_uses_trial_division():
    n = 10**7 + 19  # prime above the sieve bound
    assert prime_factors(n) == {n: 1}
    assert totient(7 * n) == 6 * (n - 1)


def test_mobius():
    assert mobius(1) == 1 and mobius(4) == 0 and mobius(6) == 1 and mobius(30) == -1
    for n in range(1, 10**4 + 1):
        s = sum(mobius(d) for d in range(1, math.isqrt(n) + 1) if n % d == 0
                for d in {d, n // d})
        assert s == (1 if n == 1 else 0)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**4))
def test_mod_inverse(a, m):
    if math.gcd(a, m) == 1:
        x = mod_inverse(a, m)
        assert 0 <= x < m and (a * x) % m == 1 % m
    else:
        with pytest.raises(NoInverseError):
            mod_inverse(a, m)


def test_mod_inverse_examples():
    assert mod_inverse(1, 9) == 1 and mod_inverse(3, 7) == 5
    with pytest.raises(NoInverseError):
        mod_inverse(2, 4)


def test_summand_bounds():
    V = SummandFunction(lambda x: np.sin(x), N=10.0)
    assert V.sup_norm >= max(abs(np.sin(x)) for x in np.linspace(0, 10, 101)) - 1e-12
    # rises 1, falls 2, rises 2, falls to sin(10)
    assert V.total_variation == pytest.approx(6.0 - math.sin(10.0), abs=1e-3)
    assert V.integral() == pytest.approx(1 - math.cos(10.0), rel=1e-10)


def test_coprime_sum_examples():
    r = coprime_totient_sum(3, 1000, SummandFunction.constant(1000))
    assert r.main_term == pytest.approx(9000 / (2 * math.pi**2), rel=1e-12)
    assert abs(r.residual) <= 40 * math.log(1000)
    assert coprime_totient_sum(2, 1, SummandFunction.constant(1)).exact_sum == 1.0
    N = 1000
    r = coprime_totient_sum(2, N, SummandFunction(lambda x: x / N, N))
    assert abs(r.residual) <= 40 * math.log(N)


def test_coprime_sum_direct():
    # independent direct loop over k
    N, ell = 300, 6
    exact = sum(totient(k) / k * (1 - k / N) for k in range(1, N + 1) if math.gcd(k, ell) == 1)
    r = coprime_totient_sum(ell, N, SummandFunction(lambda x: 1 - x / N, N))
    assert r.exact_sum == pytest.approx(exact, rel=1e-13)


def test_scaled_sum_examples():
    assert scaled_totient_sum(2, 1, SummandFunction.constant(1)).exact_sum == 1.0
    r = scaled_totient_sum(3, 1000, SummandFunction.constant(1000))
    assert r.main_term == pytest.approx(3 * 9000 / (2 * math.pi**2), rel=1e-12)
    assert abs(r.residual) <= 60 * 1000**0.1
    r = scaled_totient_sum(6, 500, SummandFunction(lambda x: 1 - x / 500, 500))
    assert abs(r.residual) <= 0.05 * r.main_term


@pytest.mark.parametrize("ell", [2, 3, 4, 5, 6])
def test_residual_scaling(ell):
    # single calibrated constant for |r| <= K (|V| + TV) ln N
    K = 60.0
    for N in (10**3, 10**4, 10**5):
        V = SummandFunction(lambda x: 1 - x / N, N)
        for fn in (coprime_totient_sum, scaled_totient_sum):
            r = fn(ell, N, V)
            assert abs(r.residual) <= K * (V.sup_norm + V.total_variation) * math.log(N)


def test_equidistribution_examples():
    r = inverse_equidistribution_check(2, 1, (0, 2), (0, 2))
    assert (r.count, r.prediction) == (1, 1.0)
    r = inverse_equidistribution_check(101, -1, (0, 101), (0, 101))
    assert r.count == 100 and r.prediction == pytest.approx(100.0)
    q = 10007
    r = inverse_equidistribution_check(q, -1, (0, 5000), (0, 5000))
    assert abs(r.count - r.prediction) <= 3 * math.sqrt(q) * math.log(q)


@pytest.mark.parametrize("q,h", [(12, 5), (30, 7), (97, 3)])
def test_equidistribution_full_box_and_brute(q, h):
    assert inverse_equidistribution_check(q, h, (0, q), (0, q)).count == totient(q)
    brute = sum(1 for a in range(3, q // 2) for b in range(1, q - 2)
                if math.gcd(b, q) == 1 and (a * b - h) % q == 0)
    assert inverse_equidistribution_check(q, h, (3, q // 2), (1, q - 2)).count == brute

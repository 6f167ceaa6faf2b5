import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from congruent_lorentz import _kernels
from congruent_lorentz.arith import totient_table
from congruent_lorentz.farey import (BeyondHorizon, BoundarySlope, EndOfSequence, FareyPair,
                                     MediantChain, ReducedFraction, bracket, enumerate_farey,
                                     farey_arrays, in_congruence_class, next_in_sequence,
                                     sink_chain_value, sum_A, sum_B, sum_C, sum_sink)
from congruent_lorentz.freepath import LatticeConfig, horizontal_free_path_brute

F = ReducedFraction


def _naive_farey(Q):
    return sorted({Fraction(a, q) for q in range(1, Q + 1) for a in range(q + 1)})


def test_enumerate_examples():
    assert [str(f) for f in enumerate_farey(5)] == \
        "0/1 1/5 1/4 1/3 2/5 1/2 3/5 2/3 3/4 4/5 1/1".split()
    assert [str(f) for f in enumerate_farey(1)] == ["0/1", "1/1"]
    assert sum(1 for _ in enumerate_farey(1000)) == 1 + int(totient_table(1000)[1:].sum())


@pytest.mark.parametrize("Q", [1, 2, 7, 30])
def test_enumerate_matches_naive(Q):
    got = [Fraction(f.a, f.q) for f in enumerate_farey(Q)]
    assert got == _naive_farey(Q)
    nums, dens = farey_arrays(Q)
    assert [Fraction(int(a), int(q)) for a, q in zip(nums, dens)] == got


def test_enumerate_subinterval():
    got = [Fraction(f.a, f.q) for f in enumerate_farey(12, (0.25, 0.5))]
    assert got == [x for x in _naive_farey(12) if Fraction(1, 4) <= x <= Fraction(1, 2)]


def test_types_validate():
    with pytest.raises(ValueError):
        F(2, 4)
    with pytest.raises(ValueError):
        F(3, 2)
    with pytest.raises(ValueError):
        FareyPair(F(1, 3), F(1, 2), 5)  # neighbours but not consecutive in F_5
    FareyPair(F(1, 3), F(2, 5), 5)


def test_next_in_sequence():
    assert next_in_sequence(FareyPair(F(1, 4), F(1, 3), 5)) == F(2, 5)
    assert next_in_sequence(FareyPair(F(0, 1), F(1, 5), 5)) == F(1, 4)
    with pytest.raises(EndOfSequence):
        next_in_sequence(FareyPair(F(4, 5), F(1, 1), 5))


def test_walk_reproduces_sequence():
    Q = 40
    seq = list(enumerate_farey(Q))
    pair = FareyPair(seq[0], seq[1], Q)
    walked = [seq[0], seq[1]]
    while True:
        try:
            nxt = next_in_sequence(pair)
        except EndOfSequence:
            break
        walked.append(nxt)
        pair = FareyPair(pair.right, nxt, Q)
    assert walked == seq


def test_consecutive_pairs_exhaustive():
    for Q in range(1, 301):
        a, q = farey_arrays(Q)
        assert np.all(a[1:] * q[:-1] - a[:-1] * q[1:] == 1)
        assert np.all(q[1:] + q[:-1] > Q) and q.max() <= Q
        for ell in (2, 3, 4, 5, 6, 7):
            s = (q - a) % ell == 0
            assert not np.any(s[1:] & s[:-1])
    farey_arrays.cache_clear()


def test_bracket_examples():
    p = bracket(0.3, 5)
    assert (p.left, p.right) == (F(1, 4), F(1, 3))
    for Q in (1, 2, 17, 10**4):
        p = bracket(0.0, Q)
        assert (p.left, p.right) == (F(0, 1), F(1, Q))
    with pytest.raises(ValueError):
        bracket(1.0, 5)


@pytest.mark.parametrize("Q", [10**2, 10**3, 10**4])
def test_bracket_vs_enumeration(Q):
    xs = np.sort(np.random.default_rng(Q).random(1000))
    ref = _kernels.brackets_by_scan(xs, Q)
    for x, (a, q, a2, q2) in zip(xs, ref):
        p = bracket(x, Q)
        assert (p.left.a, p.left.q, p.right.a, p.right.q) == (a, q, a2, q2)


def test_bracket_vs_binary_search():
    Q = 2000
    nums, dens = farey_arrays(Q)
    vals = nums / dens
    for x in np.random.default_rng(0).random(500):
        i = np.searchsorted(vals, x, side="right") - 1
        p = bracket(x, Q)
        assert (p.left.a, p.left.q) == (nums[i], dens[i])


@settings(max_examples=300, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=500), st.integers(1, 400))
def test_bracket_exact_rationals(fr, Q):
    if fr == 1:
        return
    p = bracket(float(fr), Q)
    assert Fraction(p.left.a, p.left.q) <= fr < Fraction(p.right.a, p.right.q) or \
        abs(float(fr) - p.right.value) < 1e-15


def test_congruence_class():
    assert in_congruence_class(F(1, 4), 3)
    assert not in_congruence_class(F(1, 2), 3)
    assert in_congruence_class(F(1, 2), 3, sign=-1)


def _random_pairs(Q, n, seed):
    rng = np.random.default_rng(seed)
    return [bracket(x, Q) for x in rng.random(n)]


def test_chain_interleaving():
    # eps*q = 1 makes every t_k collapse onto gamma, so keep eps just below 1/Q
    eps = 1 / 1000.5
    for pair in _random_pairs(1000, 200, 4):
        ch = MediantChain(pair, "left")
        for k in range(50):
            assert ch.gamma_k(k + 1) < ch.gamma_k(k)
            assert ch.band_edge(k + 1, eps) < ch.band_edge(k, eps)
            assert pair.left.value <= ch.band_edge(k + 1, eps) + 1e-15
        rc = MediantChain(pair, "right")
        for k in range(50):
            assert rc.gamma_k(k + 1) > rc.gamma_k(k)


@pytest.mark.parametrize("ell", [2, 3, 4, 5])
def test_chain_avoids_sinks(ell):
    Q = 200
    nums, dens = farey_arrays(Q)
    for i in range(len(nums) - 1):
        pair = FareyPair(F(int(nums[i]), int(dens[i])), F(int(nums[i + 1]), int(dens[i + 1])), Q)
        for side in ("left", "right"):
            ch = MediantChain(pair, side)
            sink = pair.left if side == "left" else pair.right
            if in_congruence_class(sink, ell):
                assert all((ch.q_k(k) - ch.a_k(k)) % ell for k in range(-0, 30))


def test_t0_u0_ordering():
    for Q in (50, 500):
        eps = 1.0 / Q  # gamma <= t0 needs eps*q <= 1, eps*(Q+1) > 1 gives t0 < u0
        for pair in _random_pairs(Q, 300, Q):
            assert pair.left.value <= pair.t0(eps) < pair.u0(eps) <= pair.right.value + 1e-15


def test_sink_chain_value_matches_brute():
    ell, eps = 3, 1e-3
    Q = int(1 / eps)
    cfg = LatticeConfig(ell, eps, "segment")
    rng = np.random.default_rng(7)
    done = 0
    while done < 1000:
        x = rng.random()
        pair = bracket(x, Q)
        if not in_congruence_class(pair.left, ell):
            continue
        try:
            ex = sink_chain_value(pair, x, eps, k_max=40 * Q)
        except BeyondHorizon:
            continue
        ref = horizontal_free_path_brute(cfg, x, ex.q_exit)
        assert ref.hit == (ex.q_exit, ex.a_exit)
        ch = MediantChain(pair)
        assert ch.band_edge(ex.k + 1, eps) < x <= ch.band_edge(ex.k, eps)
        done += 1


def test_sink_chain_rightmost_band_and_cap():
    pair = FareyPair(F(0, 1), F(1, 10), 10)  # chain toward 0/1 from 1/10
    eps = 0.1
    x = 0.0999
    ex = sink_chain_value(pair, x, eps)
    assert ex.k == -1 and ex.q_exit == 10
    with pytest.raises(BeyondHorizon):
        sink_chain_value(pair, 1e-9, eps, k_max=100)
    with pytest.raises(BeyondHorizon):
        sink_chain_value(pair, 0.0, eps)


def test_sink_chain_boundary_signal():
    pair = FareyPair(F(0, 1), F(1, 4), 4)
    eps = 0.25
    t1 = (1 * 0 + 1 - eps) / (1 * 1 + 4)  # t_1 on the left chain
    with pytest.raises(BoundarySlope):
        sink_chain_value(pair, t1, eps)


def test_sums_trivial():
    for fn in (sum_A, sum_B, sum_C):
        assert fn((0, 1), 300, 1.0, 3).enumerated == 0.0
    r = sum_sink((0, 1), 200, 500.0, 3)
    nums, dens = farey_arrays(200)
    total = 0.0
    for a, q, q2 in zip(nums[:-1], dens[:-1], dens[1:]):
        if (q - a) % 3 == 0:
            K = max(math.floor((500.0 * 200 - q2) / q), 0)
            total += (1 - q / 200) / (q * (K * q + q2)) / (1 + (a / q) ** 2)
    assert r.enumerated == pytest.approx(total, rel=1e-12)


def test_sums_match_predictions():
    assert sum_A((0, 1), 2000, 0.6, 3).rel_err <= 0.05
    for lam in (0.4,):
        assert sum_B((0, 1), 2000, lam, 2).rel_err <= 0.05
        assert sum_C((0, 1), 2000, lam, 2).rel_err <= 0.05
    b = sum_B((0, 1), 2000, 0.6, 3).enumerated
    c = sum_C((0, 1), 2000, 0.6, 3).enumerated
    assert abs(b - c) <= 0.1 * max(b, c)
    assert sum_sink((0, 1), 2000, 1.5, 3).rel_err <= 0.05


def test_sums_convergence_trend():
    e500 = sum_A((0, 1), 500, 0.6, 3).rel_err
    e2000 = sum_A((0, 1), 2000, 0.6, 3).rel_err
    assert e2000 < e500
    lams = (1.2, 1.5, 2.0, 3.0)
    small = np.mean([sum_sink((0, 1), 1000, x, 3).rel_err for x in lams])
    big = np.mean([sum_sink((0, 1), 2000, x, 3).rel_err for x in lams])
    assert big < small


def test_sum_on_subinterval():
    r = sum_A((0.2, 0.7), 2000, 0.6, 2)
    c_I = math.atan(0.7) - math.atan(0.2)
    assert r.predicted == pytest.approx(c_I * 2 / math.pi**2 * math.log(0.6) ** 2, rel=1e-14)
    assert r.rel_err <= 0.05


def test_sum_argument_checks():
    with pytest.raises(ValueError):
        sum_A((0, 1), 20000, 0.5, 3)
    with pytest.raises(ValueError):
        sum_sink((0, 1), 100, 0.5, 3)

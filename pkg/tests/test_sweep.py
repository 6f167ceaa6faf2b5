import math

import numpy as np
import pytest

from congruent_lorentz import sweep


def test_parse_grid():
    g = sweep.parse_grid("0.01:5:200")
    assert len(g) == 200 and g[0] == 0.01 and g[-1] == 5.0
    g = sweep.parse_grid("0.01:10:5:log")
    assert g[0] == pytest.approx(0.01) and g[-1] == pytest.approx(10.0)
    assert np.allclose(g[1:] / g[:-1], 1000.0 ** 0.25)
    for bad in ("1:2", "0:1:10", "2:1:10", "0.1:1:1", "a:b:c", "0.1:1:10:lin"):
        with pytest.raises(ValueError):
            sweep.parse_grid(bad)


def test_sampler_strata():
    s = sweep.StratifiedSampler(1000, seed=3, chunk=64)
    w = s.all_directions()
    assert len(w) == 1000 and s.n_chunks == 16
    idx = np.floor(w / (2 * math.pi) * 1000).astype(int)
    assert np.array_equal(idx, np.arange(1000))
    assert np.array_equal(w, sweep.StratifiedSampler(1000, seed=3, chunk=64).all_directions())
    assert not np.array_equal(w, sweep.StratifiedSampler(1000, seed=4, chunk=64).all_directions())
    with pytest.raises(ValueError):
        sweep.StratifiedSampler(0)


def test_chunks_independent():
    s = sweep.StratifiedSampler(10_000, seed=9, chunk=1000)
    assert np.array_equal(s.directions(7), sweep.StratifiedSampler(10_000, 9, chunk=1000).directions(7))


def test_survival_counts():
    v = np.array([0.5, np.inf, np.nan, 0.1, 2.0])
    assert list(sweep.survival_counts(v, np.array([0.05, 0.5, 1.0, 10.0]))) == [5, 3, 3, 2]


def test_run_independent_of_workers():
    s = sweep.StratifiedSampler(50_000, seed=1, chunk=4096)
    lams = np.linspace(0, 6, 50)

    def kern(w):
        return np.sin(w) ** 2 * 5

    ref = sweep.run(s, kern, lams, 1)
    for k in (2, 3, 8):
        assert np.array_equal(sweep.run(s, kern, lams, k), ref)
    with pytest.raises(ValueError):
        sweep.run(s, kern, lams, 0)

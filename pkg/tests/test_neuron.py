import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from loki_sim.neuron import (LeakConfig, fire_check, integrate, integrate_lanes, leak,
                             leak_fire_lanes, leak_fire_step, leak_lanes)

V_RANGE = range(-128, 128)
W_RANGE = range(-8, 8)
ALL_LEAKS = [LeakConfig.no_leak()] + [LeakConfig.shift(k) for k in range(8)]


def widened_clamp(v, w):
    s = int(v) + int(w)  # unbounded Python int, then clamp
    return max(-128, min(127, s))


def leak_oracle(v, cfg):
    """v scaled by alpha = 1 - 2**-k, magnitude rounded up (never past zero)."""
    if cfg.k is None:
        return v
    alpha = 1 - Fraction(1, 2 ** cfg.k)
    mag = math.ceil(abs(v) * alpha)
    return mag if v >= 0 else -mag


@pytest.mark.parametrize("v,w,out", [(0, 7, 7), (127, 7, 127), (-128, -8, -128)])
def test_integrate_examples(v, w, out):
    assert integrate(v, w) == out == widened_clamp(v, w)


def test_integrate_exhaustive():
    for v in V_RANGE:
        for w in W_RANGE:
            r = integrate(v, w)
            assert -128 <= r <= 127
            assert r == widened_clamp(v, w)
            if -128 <= v + w <= 127:
                assert r == v + w


@pytest.mark.parametrize("k", range(8))
def test_leak_zero_is_fixed(k):
    assert leak(0, LeakConfig.shift(k)) == 0


def test_leak_examples():
    assert leak(-1, LeakConfig.shift(4)) == -1
    assert leak(100, LeakConfig.shift(2)) == 75
    assert leak(100, LeakConfig.no_leak()) == 100
    assert all(leak(v, LeakConfig.shift(0)) == 0 for v in V_RANGE)


@pytest.mark.parametrize("cfg", ALL_LEAKS, ids=str)
def test_leak_exhaustive(cfg):
    for v in V_RANGE:
        out = leak(v, cfg)
        assert out == leak_oracle(v, cfg)
        assert abs(out) <= abs(v)
        assert out * v >= 0
        if cfg.k is not None:
            assert (out == v) == (abs(v) < 2 ** cfg.k)


def test_leak_is_symmetric():
    for cfg in ALL_LEAKS:
        for v in range(-127, 128):
            assert leak(-v, cfg) == -leak(v, cfg)


def test_fire_check_boundary():
    for th in V_RANGE:
        assert fire_check(th, th)
        if th > -128:
            assert not fire_check(th - 1, th)
    assert fire_check(127, -128)


def test_leak_fire_step_examples():
    for th in (1, 50, 127):
        for cfg in ALL_LEAKS:
            assert leak_fire_step(th, th, cfg) == (0, True)
    assert leak_fire_step(9, 10, LeakConfig.shift(1)) == (leak(9, LeakConfig.shift(1)), False)
    assert leak_fire_step(9, 10, LeakConfig.shift(1)) == (5, False)
    assert leak_fire_step(0, 1, LeakConfig.no_leak()) == (0, False)


def test_reset_exclusive():
    for th in range(-128, 128, 7):
        for cfg in ALL_LEAKS:
            for v in V_RANGE:
                out, fired = leak_fire_step(v, th, cfg)
                assert not (fired and out != 0)


@pytest.mark.parametrize("k", [-1, 8, 100])
def test_leak_config_range(k):
    with pytest.raises(ValueError):
        LeakConfig(k)


def test_leak_byte_codes():
    assert LeakConfig.from_byte(0xFF) == LeakConfig.no_leak()
    for k in range(8):
        assert LeakConfig.from_byte(k).to_byte() == k
    with pytest.raises(ValueError):
        LeakConfig.from_byte(8)
    assert LeakConfig(0).alpha == 0.0
    assert LeakConfig(None).alpha == 1.0


def test_lanes_match_scalar_exhaustively():
    v = np.repeat(np.arange(-128, 128, dtype=np.int16), 16)
    w = np.tile(np.arange(-8, 8, dtype=np.int16), 256)
    for i in range(0, v.size, 32):
        out = integrate_lanes(v[i:i + 32], w[i:i + 32])
        assert out.tolist() == [integrate(a, b) for a, b in zip(v[i:i + 32], w[i:i + 32])]
    vals = np.arange(-128, 128, dtype=np.int16)
    for cfg in ALL_LEAKS:
        assert leak_lanes(vals, cfg).tolist() == [leak(int(x), cfg) for x in vals]


@given(st.lists(st.integers(-128, 127), min_size=32, max_size=32),
       st.integers(-128, 127), st.sampled_from(ALL_LEAKS))
def test_leak_fire_lanes_match_scalar(vals, th, cfg):
    new, fired = leak_fire_lanes(np.array(vals, dtype=np.int16), th, cfg)
    expect = [leak_fire_step(v, th, cfg) for v in vals]
    assert new.tolist() == [e[0] for e in expect]
    assert fired.tolist() == [e[1] for e in expect]

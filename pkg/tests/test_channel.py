import numpy as np
import pytest

from ostbc_relay.channel import USAGE_TAGS, ChannelRealization, RngStream, complex_normal, sample_awgn, sample_channel
from ostbc_relay.protocol import SystemConfig


def test_streams_are_reproducible_and_distinct():
    a = complex_normal(RngStream(5, (0, 1, 2)), (100,))
    b = complex_normal(RngStream(5, (0, 1, 2)), (100,))
    c = complex_normal(RngStream(5, (0, 1, 3)), (100,))
    d = complex_normal(RngStream(6, (0, 1, 2)), (100,))
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c) and not np.allclose(a, d)


def test_for_trials_keys():
    s = RngStream.for_trials(9, block=4, tag="user-noise", point=2)
    assert s.stream_id == (2, 4, USAGE_TAGS["user-noise"])
    with pytest.raises(KeyError):
        RngStream.for_trials(9, 0, "nope")


def test_prefix_stability():
    full = complex_normal(RngStream(1, (0,)), (50, 3, 2))
    part = complex_normal(RngStream(1, (0,)), (20, 3, 2))
    np.testing.assert_array_equal(full[:20], part)


def test_complex_normal_statistics():
    x = complex_normal(np.random.default_rng(0), (200_000,))
    assert abs(np.mean(np.abs(x) ** 2) - 1.0) < 0.01
    assert abs(np.mean(x.real**2) - 0.5) < 0.01
    assert abs(np.mean(x**2)) < 0.01  # circular


def test_sample_channel_shapes_and_products():
    cfg = SystemConfig(n1=2, n2=2, nr=3)
    ch = sample_channel(cfg, RngStream(0), trials=7)
    assert ch.h1.shape == (7, 2, 3) and ch.h2.shape == (7, 2, 3)
    np.testing.assert_allclose(ch.g_own(1), ch.h1 @ np.swapaxes(ch.h1, 1, 2))
    np.testing.assert_allclose(ch.g_cross(1, 2), ch.h1 @ np.swapaxes(ch.h2, 1, 2))
    np.testing.assert_allclose(ch.g_cross(2, 1), np.swapaxes(ch.g_cross(1, 2), 1, 2))
    sw = ch.swapped()
    assert sw.h1 is ch.h2 and sw.h2 is ch.h1
    assert sample_channel(cfg, RngStream(0)).h1.shape == (2, 3)


def test_sample_awgn():
    w = sample_awgn(2, 3, RngStream(3), trials=4)
    assert w.shape == (4, 2, 3) and w.dtype == np.complex128
    assert isinstance(ChannelRealization(w, w).h(2), np.ndarray)

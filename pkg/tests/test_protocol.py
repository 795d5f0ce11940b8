import numpy as np
import pytest

from ostbc_relay.channel import RngStream, complex_normal, sample_channel
from ostbc_relay.linalg import herm
from ostbc_relay.ostbc import constellation, encode
from ostbc_relay.protocol import (
    SystemConfig,
    relay_gain,
    relay_pilot,
    run_phase1,
    run_phase2,
    run_phase3,
    run_phase4,
    user_pilot,
)


def _setup(trials=None, **kw):
    cfg = SystemConfig(**kw)
    return cfg, sample_channel(cfg, RngStream(11), trials)


def test_config_validation():
    with pytest.raises(ValueError):
        SystemConfig(n1=3)  # Alamouti needs two antennas
    with pytest.raises(ValueError):
        SystemConfig(m_p=0)
    with pytest.raises(ValueError):
        SystemConfig(gain=None, budget=None)
    with pytest.raises(ValueError):
        SystemConfig(gain=-1.0)
    with pytest.raises(ValueError):
        SystemConfig(pilot_energy="loud")


def test_config_accessors():
    cfg = SystemConfig(n_p1=2, n_p2=5, gamma_bar_1=3.0, gamma_bar_2=7.0)
    assert (cfg.n_p(1), cfg.n_p(2), cfg.rho, cfg.t_slots) == (2, 5, 10.0, 2)
    assert cfg.symbol_energy(2) == pytest.approx(3.5)
    sw = cfg.swapped()
    assert (sw.n_p1, sw.gamma_bar_1) == (5, 7.0)
    assert cfg.with_snr(4.0).gamma_bar_2 == 4.0


def test_relay_gain_from_budget_meets_power_constraint():
    cfg = SystemConfig(gain=None, budget=8.0, gamma_bar_1=4.0, gamma_bar_2=2.0, constellation=constellation("qpsk"))
    a = relay_gain(cfg)
    assert a == pytest.approx(np.sqrt(8.0 / (2 * 2 * 7.0)))
    n = 200_000
    ch = sample_channel(cfg, RngStream(1), n)
    rng = np.random.default_rng(2)
    idx = rng.integers(0, 4, size=(n, 2, 2))
    pts = cfg.constellation.points
    c1 = encode(cfg.code, pts[idx[:, 0]], cfg.symbol_energy(1))
    c2 = encode(cfg.code, pts[idx[:, 1]], cfg.symbol_energy(2))
    ph4 = run_phase4(cfg, ch, c1, c2, RngStream(3), RngStream(4))
    power = a**2 * np.mean(np.sum(np.abs(ph4.y_relay) ** 2, axis=(1, 2)))
    assert power == pytest.approx(8.0, rel=0.01)
    assert SystemConfig(gain=0.3, budget=5.0).gain == 0.3 and relay_gain(SystemConfig(gain=0.3, budget=5.0)) == 0.3


def test_pilots():
    s = relay_pilot(3, 2)
    assert s.shape == (3, 6)
    np.testing.assert_allclose(s @ herm(s), 2 * np.eye(3), atol=1e-12)
    c = user_pilot(2, 4, amplitude=np.sqrt(5.0))
    np.testing.assert_allclose(c @ herm(c), 20 * np.eye(2), atol=1e-12)
    cfg = SystemConfig(gamma_bar_1=9.0)
    assert cfg.pilot_amplitude(1) == 3.0
    assert SystemConfig(gamma_bar_1=9.0, pilot_energy="unit").pilot_amplitude(1) == 1.0


def test_phase1_noiseless_and_injected():
    cfg, ch = _setup(m_p=2)
    ph = run_phase1(cfg, ch, noiseless=True)
    np.testing.assert_allclose(ph.r(1), ch.h1 @ ph.pilot)
    noise = np.ones((4, 4))
    ph = run_phase1(cfg, ch, noise=noise)
    np.testing.assert_allclose(ph.r2, ch.h2 @ ph.pilot + 1)


def test_phase2_structure_shares_relay_noise():
    cfg, ch = _setup(n_p1=2, gamma_bar_1=4.0)
    u = complex_normal(np.random.default_rng(0), (2, 4))
    noise = np.concatenate([u, np.zeros((4, 4))])
    ph = run_phase2(cfg, ch, noise=noise, sender=1)
    c = ph.pilot
    np.testing.assert_allclose(ph.r_other, ch.h2 @ ch.h1.T @ c + ch.h2 @ u, atol=1e-12)
    np.testing.assert_allclose(ph.r_self, ch.h1 @ ch.h1.T @ c + ch.h1 @ u, atol=1e-12)
    ph3 = run_phase3(cfg, ch, noiseless=True)
    assert ph3.sender == 2
    np.testing.assert_allclose(ph3.r_other, ch.g_cross(1, 2) @ ph3.pilot, atol=1e-12)


def test_phase4_noiseless():
    cfg, ch = _setup(gain=0.5)
    c1, c2 = np.eye(2), 2 * np.eye(2)
    ph = run_phase4(cfg, ch, c1, c2, noiseless=True)
    expect = 0.5 * (ch.g_own(1) @ c1 + ch.g_cross(1, 2) @ c2)
    np.testing.assert_allclose(ph.y(1), expect, atol=1e-12)
    assert ph.gain == 0.5

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ostbc_relay.analytic import SnrModel, db_to_linear, ser_mpsk
from ostbc_relay.montecarlo import ErrorStats, StopRule, compare, run_block, run_campaign, run_point
from ostbc_relay.ostbc import constellation
from ostbc_relay.protocol import SystemConfig

CFG = SystemConfig(n1=2, n2=2, nr=2, n_p1=1, n_p2=1, gain=1.0)


@pytest.mark.parametrize("mode", ["perfect", "estimated"])
@pytest.mark.parametrize("name", ["bpsk", "qpsk", "16qam"])
def test_noiseless_has_no_errors(mode, name):
    cfg = SystemConfig(gain=1.0, constellation=constellation(name)).with_snr(100.0)
    c = run_block(cfg, seed=3, point=0, block=0, n_trials=300, mode=mode, noiseless=True)
    assert c.symbol_errors == 0 and c.bit_errors == 0
    assert c.symbols == 600


def test_perfect_csi_matches_analysis():
    stats = run_campaign(CFG, [8.0], StopRule(400_000, 400), seed=11, mode="perfect")
    ref = ser_mpsk(SnrModel.from_config(CFG, perfect=True), 2, float(db_to_linear(8.0)))
    (z,) = compare(stats, [ref])
    assert not z.flagged, z


def test_workers_do_not_change_results():
    stop = StopRule(20_000, 150)
    one = run_campaign(CFG, [0.0, 6.0], stop, seed=5, workers=1, block_size=1000)
    three = run_campaign(CFG, [0.0, 6.0], stop, seed=5, workers=3, block_size=1000)
    assert one == three


def test_stop_rule_and_determinism():
    a = run_point(CFG, 0.0, 0, seed=9, stop=StopRule(50_000, 100), block_size=500)
    b = run_point(CFG, 0.0, 0, seed=9, stop=StopRule(50_000, 100), block_size=500)
    assert a == b
    assert a.symbol_errors >= 100 and a.trials % 500 == 0 and a.trials < 50_000
    capped = run_point(CFG, 30.0, 0, seed=9, stop=StopRule(1234, 10**9), block_size=500)
    assert capped.trials == 1234
    other = run_point(CFG, 0.0, 0, seed=10, stop=StopRule(50_000, 100), block_size=500)
    assert other != a
    with pytest.raises(ValueError):
        StopRule(0)
    with pytest.raises(ValueError):
        run_block(CFG, 0, 0, 0, 10, mode="genie")


def test_on_point_callback():
    seen = []
    run_campaign(CFG, [0.0, 2.0], StopRule(2000, None), seed=1, on_point=seen.append)
    assert [s.snr_db for s in seen] == [0.0, 2.0]


def test_compare_flags_corruption():
    st_ = ErrorStats(5.0, "estimated", 10**5, 2 * 10**5, 2 * 10**5, 2000, 2000)
    (same,) = compare([st_], [st_.ber])
    assert same.z == 0.0 and not same.flagged
    (bad,) = compare([st_], [2 * st_.ber])
    assert bad.flagged and bad.z < 0
    zero = ErrorStats(5.0, "estimated", 10, 20, 20, 0, 0)
    assert compare([zero], [0.0])[0].z == 0.0
    assert compare([zero], [0.5])[0].flagged
    with pytest.raises(ValueError):
        compare([st_], [])


def test_ci_shrinks_with_sample_size():
    small = ErrorStats(0.0, "perfect", 10**4, 10**4, 10**4, 100, 100)
    big = ErrorStats(0.0, "perfect", 10**6, 10**6, 10**6, 10**4, 10**4)
    assert small.ber == big.ber
    assert small.ci95 / big.ci95 == pytest.approx(10.0)
    assert small.ci95 == pytest.approx(1.959963984540054 * math.sqrt(0.01 * 0.99 / 1e4))


@given(st.integers(1, 10**6), st.integers(1, 8), st.data())
def test_error_stats_invariants(n, bits_per, data):
    se = data.draw(st.integers(0, n))
    be = data.draw(st.integers(se, min(n * bits_per, se * bits_per)))
    s = ErrorStats(0.0, "perfect", n, n, n * bits_per, se, be)
    assert 0 <= s.ber <= s.ser <= 1 or bits_per == 1
    assert s.ci95 >= 0 and s.ser_ci95 >= 0


def test_error_stats_validation():
    with pytest.raises(ValueError):
        ErrorStats(0.0, "perfect", 10, 10, 10, 11, 0)


def test_ber_decreases_with_snr():
    stats = run_campaign(CFG, [0.0, 5.0, 10.0], StopRule(100_000, 300), seed=2)
    bers = [s.ber for s in stats]
    assert bers[0] > bers[1] > bers[2]

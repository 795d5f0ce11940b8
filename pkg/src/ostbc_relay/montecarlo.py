"""Monte Carlo error-rate campaigns.

Trials are grouped into fixed-size blocks.  Every random draw of a block comes
from streams keyed by ``(seed, SNR point, block, usage)``, so a block's error
counts do not depend on which process evaluates it.  Blocks are folded into
the running totals strictly in block order and the stop rule is evaluated on
that ordered prefix; workers that run ahead only waste time, never change the
answer.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import RngStream, sample_channel
from .decoder import DecoderInput, decode_exhaustive, decode_symbolwise
from .estimation import estimate_user_csi, exact_csi
from .ostbc import encode, map_bits
from .protocol import run_phase1, run_phase2, run_phase4

__all__ = [
    "MODES",
    "DECODERS",
    "ErrorStats",
    "StopRule",
    "run_block",
    "run_point",
    "run_campaign",
    "compare",
    "ZScore",
]

MODES = ("perfect", "estimated")
DECODERS = {"exhaustive": decode_exhaustive, "symbolwise": decode_symbolwise}
BLOCK_SIZE = 2048
Z95 = 1.959963984540054


@dataclass(frozen=True)
class ErrorStats:
    """Error counts at one SNR point."""

    snr_db: float
    mode: str
    trials: int
    symbols: int
    bits: int
    symbol_errors: int
    bit_errors: int

    def __post_init__(self):
        if not (0 <= self.symbol_errors <= self.symbols and 0 <= self.bit_errors <= self.bits):
            raise ValueError("error counts exceed the number of transmitted symbols/bits")

    @property
    def ber(self):
        return self.bit_errors / self.bits if self.bits else math.nan

    @property
    def ser(self):
        return self.symbol_errors / self.symbols if self.symbols else math.nan

    @staticmethod
    def _half_width(rate, n):
        return Z95 * math.sqrt(rate * (1.0 - rate) / n) if n else math.nan

    @property
    def ci95(self):
        """Normal-approximation 95% half-width of the BER."""
        return self._half_width(self.ber, self.bits)

    @property
    def ser_ci95(self):
        return self._half_width(self.ser, self.symbols)

    def sigma(self, metric="ber"):
        rate, n = (self.ber, self.bits) if metric == "ber" else (self.ser, self.symbols)
        return math.sqrt(rate * (1.0 - rate) / n)


@dataclass(frozen=True)
class StopRule:
    """Stop at ``max_trials`` or once ``min_errors`` symbol errors are seen."""

    max_trials: int = 10**6
    min_errors: int | None = 200

    def __post_init__(self):
        if self.max_trials < 1:
            raise ValueError("max_trials must be positive")


class _Counts(NamedTuple):
    trials: int
    symbols: int
    bits: int
    symbol_errors: int
    bit_errors: int


def _stream(seed, point, block, tag):
    return RngStream.for_trials(seed, block, tag, point=point)


def run_block(cfg, seed, point, block, n_trials, mode="estimated", decoder="exhaustive", user=1, noiseless=False):
    """Simulate one block of trials for the designated ``user``; returns counts."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    j = 3 - user
    code, const = cfg.code, cfg.constellation
    channels = sample_channel(cfg, _stream(seed, point, block, "channel"), n_trials)

    k = const.bits_per_symbol
    bits = _stream(seed, point, block, "data-symbols").generator().integers(
        0, 2, size=(n_trials, 2, code.m_symbols * k), dtype=np.int64
    )
    sym_idx = map_bits(const, bits)
    c1 = encode(code, const.points[sym_idx[:, 0]], cfg.symbol_energy(1))
    c2 = encode(code, const.points[sym_idx[:, 1]], cfg.symbol_energy(2))

    if mode == "estimated":
        ph1 = run_phase1(cfg, channels, _stream(seed, point, block, "pilot-noise-phase1"), noiseless=noiseless)
        ph2 = run_phase2(cfg, channels, _stream(seed, point, block, "pilot-noise-phase2"), sender=1, noiseless=noiseless)
        ph3 = run_phase2(cfg, channels, _stream(seed, point, block, "pilot-noise-phase3"), sender=2, noiseless=noiseless)
        own, cross = (ph2, ph3) if user == 1 else (ph3, ph2)
        csi = estimate_user_csi(user, ph1, own, cross)
    else:
        csi = exact_csi(channels, user)

    ph4 = run_phase4(
        cfg,
        channels,
        c1,
        c2,
        _stream(seed, point, block, "relay-noise"),
        _stream(seed, point, block, "user-noise"),
        noiseless=noiseless,
    )
    own_cw = c1 if user == 1 else c2
    inp = DecoderInput(ph4.y(user), csi, own_cw, ph4.gain, cfg.symbol_energy(j))
    decided = DECODERS[decoder](inp, const, code)

    sent = sym_idx[:, j - 1]
    label_bits = const.label_bits()
    sym_err = int(np.count_nonzero(decided != sent))
    bit_err = int(np.count_nonzero(label_bits[decided] != label_bits[sent]))
    return _Counts(n_trials, n_trials * code.m_symbols, n_trials * code.m_symbols * k, sym_err, bit_err)


def _block_sizes(max_trials, block_size):
    full, rest = divmod(max_trials, block_size)
    return [block_size] * full + ([rest] if rest else [])


def _fold(total, c):
    return _Counts(*(x + y for x, y in zip(total, c)))


def run_point(cfg, snr_db, point, seed, stop=StopRule(), *, mode="estimated", decoder="exhaustive",
              user=1, noiseless=False, executor=None, block_size=BLOCK_SIZE, wave=1):
    """Error statistics at a single SNR (both users at the same ``gamma_bar``)."""
    g = 10.0 ** (snr_db / 10.0)
    point_cfg = cfg.with_snr(g, g)
    sizes = _block_sizes(stop.max_trials, block_size)
    total = _Counts(0, 0, 0, 0, 0)
    args = dict(mode=mode, decoder=decoder, user=user, noiseless=noiseless)
    next_block = 0
    while next_block < len(sizes):
        batch = range(next_block, min(len(sizes), next_block + max(1, wave)))
        if executor is None:
            results = (run_block(point_cfg, seed, point, b, sizes[b], **args) for b in batch)
        else:
            futures = [executor.submit(run_block, point_cfg, seed, point, b, sizes[b], **args) for b in batch]
            results = (f.result() for f in futures)
        for c in results:
            total = _fold(total, c)
            next_block += 1
            if stop.min_errors is not None and total.symbol_errors >= stop.min_errors:
                return ErrorStats(float(snr_db), mode, total.trials, total.symbols, total.bits,
                                  total.symbol_errors, total.bit_errors)
    return ErrorStats(float(snr_db), mode, total.trials, total.symbols, total.bits, total.symbol_errors, total.bit_errors)


def run_campaign(cfg, snr_grid_db, stop=StopRule(), *, seed=0, mode="estimated", decoder="exhaustive",
                 user=1, noiseless=False, workers=1, block_size=BLOCK_SIZE, on_point=None):
    """Run every SNR point of ``snr_grid_db``; returns a list of :class:`ErrorStats`.

    Results are identical for any ``workers`` value.  ``on_point`` is called
    with each finished :class:`ErrorStats` (for streaming to the caller).
    """
    out = []
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for point, snr_db in enumerate(snr_grid_db):
            st = run_point(cfg, float(snr_db), point, seed, stop, mode=mode, decoder=decoder, user=user,
                           noiseless=noiseless, executor=executor, block_size=block_size, wave=2 * workers)
            out.append(st)
            if on_point is not None:
                on_point(st)
    finally:
        if executor is not None:
            executor.shutdown()
    return out


class ZScore(NamedTuple):
    snr_db: float
    simulated: float
    analytic: float
    z: float

    @property
    def flagged(self):
        return abs(self.z) > 3.0


def compare(sim, analytic, metric="ber"):
    """Per-point ``z = (sim - analytic) / sigma_sim``.

    ``analytic`` holds one value per entry of ``sim``.  When the simulated
    rate is zero its binomial sigma vanishes; the analytic rate's sigma at the
    same sample size is used instead.
    """
    if len(sim) != len(analytic):
        raise ValueError("simulation and analytic curves have different lengths")
    report = []
    for st, ref in zip(sim, analytic):
        rate = st.ber if metric == "ber" else st.ser
        n = st.bits if metric == "ber" else st.symbols
        sigma = st.sigma(metric)
        if sigma == 0.0:
            sigma = math.sqrt(ref * (1.0 - ref) / n)
        diff = rate - ref
        z = 0.0 if diff == 0.0 else (diff / sigma if sigma > 0 else math.copysign(math.inf, diff))
        report.append(ZScore(st.snr_db, rate, float(ref), z))
    return report

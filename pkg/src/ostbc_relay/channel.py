"""Rayleigh MIMO channels, AWGN, and reproducible random streams.

Randomness is never drawn from a shared generator.  Each consumer asks for a
stream keyed by ``(seed, point, block, tag)``; the key is hashed by
:class:`numpy.random.SeedSequence` into a Philox counter-based generator.  A
block of trials therefore sees the same samples no matter which worker process
evaluates it or in what order.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import transpose

__all__ = [
    "USAGE_TAGS",
    "RngStream",
    "ChannelRealization",
    "complex_normal",
    "sample_channel",
    "sample_awgn",
]

# Stable integer ids: changing these changes every simulated result.
USAGE_TAGS = {
    "channel": 1,
    "relay-noise": 2,
    "user-noise": 3,
    "pilot-noise-phase1": 4,
    "pilot-noise-phase2": 5,
    "pilot-noise-phase3": 6,
    "data-symbols": 7,
}


@dataclass(frozen=True)
class RngStream:
    """Identity of one independent random stream.

    ``stream_id`` is a tuple of non-negative integers (for the simulator:
    SNR-point index, trial-block index, usage tag).  Two streams with equal
    ``(seed, stream_id)`` produce bit-identical samples.
    """

    seed: int
    stream_id: tuple = ()

    @classmethod
    def for_trials(cls, seed, block, tag, point=0):
        if tag not in USAGE_TAGS:
            raise KeyError(f"unknown usage tag {tag!r}")
        return cls(int(seed), (int(point), int(block), USAGE_TAGS[tag]))

    def generator(self):
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream_id)
        return np.random.Generator(np.random.Philox(ss))


def _generator(rng):
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def complex_normal(rng, shape):
    """Circular complex Gaussian samples with unit variance.

    Samples are drawn trial-major (real/imag interleaved on the last axis), so
    the first ``k`` entries along axis 0 do not depend on the total size.
    """
    g = _generator(rng)
    shape = tuple(shape)
    x = g.standard_normal(shape + (2,))
    return (x[..., 0] + 1j * x[..., 1]) * np.sqrt(0.5)


@dataclass(frozen=True)
class ChannelRealization:
    """Relay-to-user channels ``h1`` (N1 x Nr) and ``h2`` (N2 x Nr).

    The arrays may carry a leading trial axis.  Reciprocity is built in: the
    user-to-relay channel is ``h.T``.
    """

    h1: np.ndarray
    h2: np.ndarray

    def h(self, i):
        return self.h1 if i == 1 else self.h2

    def g_own(self, i):
        """``G_i = H_i H_i^T``."""
        h = self.h(i)
        return h @ transpose(h)

    def g_cross(self, i, j):
        """``G_ij = H_i H_j^T``."""
        return self.h(i) @ transpose(self.h(j))

    def swapped(self):
        return ChannelRealization(self.h2, self.h1)


def sample_channel(cfg, rng, trials=None):
    """Draw i.i.d. Rayleigh channels for ``cfg``.

    ``trials`` adds a leading batch axis.  Both matrices come from one draw of
    shape ``(trials, N1 + N2, Nr)`` so each trial's pair is prefix-stable.
    """
    lead = () if trials is None else (int(trials),)
    both = complex_normal(rng, lead + (cfg.n1 + cfg.n2, cfg.nr))
    return ChannelRealization(both[..., : cfg.n1, :], both[..., cfg.n1 :, :])


def sample_awgn(rows, cols, rng, trials=None):
    lead = () if trials is None else (int(trials),)
    return complex_normal(rng, lead + (rows, cols))

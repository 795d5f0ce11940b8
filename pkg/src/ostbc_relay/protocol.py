"""Signal-level model of the four-phase training + data relaying protocol.

Phase 1: the relay broadcasts ``S_p`` and each user receives ``R_i = H_i S_p + N_i``.
Phase 2: User-1 sends pilots ``C_p1``; the relay forwards with unit gain.
Phase 3: the same with the users' roles exchanged.
Phase 4: both users send OSTBC codewords; the relay amplifies by ``a`` and broadcasts.

All arrays may carry a leading trial axis.  Noise is drawn from the stream
passed in, or injected explicitly through ``noise=`` (used by the tests), or
switched off with ``noiseless=True``.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .channel import complex_normal
from .linalg import dft_unitary, transpose
from .ostbc import alamouti, constellation

__all__ = [
    "SystemConfig",
    "relay_gain",
    "relay_pilot",
    "user_pilot",
    "Phase1Signals",
    "Phase2Signals",
    "Phase4Signals",
    "run_phase1",
    "run_phase2",
    "run_phase3",
    "run_phase4",
]

PILOT_ENERGY_MODES = ("codeword", "unit")


@dataclass(frozen=True)
class SystemConfig:
    """Scenario parameters.

    ``gain`` fixes the relay amplification directly; when it is ``None`` the
    gain follows from the power budget ``budget``.  ``pilot_energy`` selects
    how the users scale their training blocks: ``"codeword"`` gives each
    ``N_i x N_i`` pilot block the energy of one data codeword
    (``B B^H = gamma_bar_i I``), ``"unit"`` sends unitary blocks as-is.
    The relay pilot in phase 1 is always unitary.
    """

    n1: int = 2
    n2: int = 2
    nr: int = 2
    m_p: int = 1
    n_p1: int = 1
    n_p2: int = 1
    gamma_bar_1: float = 1.0
    gamma_bar_2: float = 1.0
    gain: float | None = 1.0
    budget: float | None = None
    code: object = field(default_factory=alamouti, compare=False)
    constellation: object = field(default_factory=lambda: constellation("bpsk"), compare=False)
    pilot_energy: str = "codeword"

    def __post_init__(self):
        for name in ("n1", "n2", "nr", "m_p", "n_p1", "n_p2"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if self.gain is None and self.budget is None:
            raise ValueError("either a fixed gain or a relay power budget is required")
        if self.gain is not None and self.gain <= 0:
            raise ValueError("relay gain must be positive")
        if self.budget is not None and self.budget <= 0:
            raise ValueError("relay power budget must be positive")
        if self.pilot_energy not in PILOT_ENERGY_MODES:
            raise ValueError(f"pilot_energy must be one of {PILOT_ENERGY_MODES}")
        for i in (1, 2):
            if self.n(i) != self.code.n_tx:
                raise ValueError(f"user {i} has {self.n(i)} antennas but {self.code.name} needs {self.code.n_tx}")

    def n(self, i):
        return self.n1 if i == 1 else self.n2

    def n_p(self, i):
        return self.n_p1 if i == 1 else self.n_p2

    def gamma_bar(self, i):
        return self.gamma_bar_1 if i == 1 else self.gamma_bar_2

    @property
    def t_slots(self):
        return self.code.t_slots

    @property
    def rho(self):
        return self.gamma_bar_1 + self.gamma_bar_2

    def symbol_energy(self, i):
        """Energy per information symbol giving ``E||c(m)||^2 = gamma_bar_i``."""
        return self.gamma_bar(i) / (self.code.rate * self.n(i))

    def pilot_amplitude(self, i):
        if self.pilot_energy == "unit":
            return 1.0
        return float(np.sqrt(self.gamma_bar(i)))

    def with_snr(self, gamma_bar_1, gamma_bar_2=None):
        g2 = gamma_bar_1 if gamma_bar_2 is None else gamma_bar_2
        return replace(self, gamma_bar_1=float(gamma_bar_1), gamma_bar_2=float(g2))

    def swapped(self):
        """The same scenario seen with the user labels exchanged."""
        return replace(
            self,
            n1=self.n2,
            n2=self.n1,
            n_p1=self.n_p2,
            n_p2=self.n_p1,
            gamma_bar_1=self.gamma_bar_2,
            gamma_bar_2=self.gamma_bar_1,
        )


def relay_gain(cfg):
    """Fixed relay gain ``a``.

    With a fixed ``cfg.gain`` that value is returned.  Otherwise
    ``a = sqrt(b / (Nr T (1 + rho)))`` meets the average power constraint
    ``E||a Y_r||_F^2 <= b`` with ``rho = gamma_bar_1 + gamma_bar_2``.
    """
    if cfg.gain is not None:
        return float(cfg.gain)
    return float(np.sqrt(cfg.budget / (cfg.nr * cfg.t_slots * (1.0 + cfg.rho))))


def relay_pilot(nr, m_p):
    """``Nr x (M_p Nr)`` relay pilot: ``M_p`` copies of a unitary DFT block."""
    return np.tile(dft_unitary(nr), (1, m_p))


def user_pilot(n, n_p, amplitude=1.0):
    """``N x (N_p N)`` user pilot with ``C C^H = N_p amplitude^2 I``."""
    return amplitude * np.tile(dft_unitary(n), (1, n_p))


def _noise(rng, shape, noiseless):
    if noiseless:
        return np.zeros(shape, dtype=np.complex128)
    return complex_normal(rng, shape)


def _lead(channels):
    return channels.h1.shape[:-2]


@dataclass(frozen=True)
class Phase1Signals:
    pilot: np.ndarray
    r1: np.ndarray
    r2: np.ndarray

    def r(self, i):
        return self.r1 if i == 1 else self.r2


def run_phase1(cfg, channels, rng=None, *, noise=None, noiseless=False):
    """Relay pilot broadcast: ``R_i = H_i S_p + N_i`` for both users."""
    s_p = relay_pilot(cfg.nr, cfg.m_p)
    p = s_p.shape[1]
    if noise is None:
        noise = _noise(rng, _lead(channels) + (cfg.n1 + cfg.n2, p), noiseless)
    n1, n2 = noise[..., : cfg.n1, :], noise[..., cfg.n1 :, :]
    return Phase1Signals(s_p, channels.h1 @ s_p + n1, channels.h2 @ s_p + n2)


@dataclass(frozen=True)
class Phase2Signals:
    """Receptions while user ``sender`` trains.

    ``r_other`` is ``R~_j = H_j H_i^T C_pi + H_j U_i + N_j`` at the partner,
    ``r_self`` is ``R-_i = G_i C_pi + H_i U_i + N_i`` at the sender itself.
    Both share the relay noise ``U_i``.
    """

    sender: int
    pilot: np.ndarray
    r_other: np.ndarray
    r_self: np.ndarray


def run_phase2(cfg, channels, rng=None, *, sender=1, noise=None, noiseless=False):
    """Cascaded-channel training with user ``sender`` transmitting.

    Phase 3 is this function with ``sender=2``.  ``noise`` (when given) is an
    array of shape ``(..., Nr + N_i + N_j, L)`` stacking ``U``, ``N_i``, ``N_j``.
    """
    i, j = sender, 3 - sender
    h_i, h_j = channels.h(i), channels.h(j)
    c_p = user_pilot(cfg.n(i), cfg.n_p(i), cfg.pilot_amplitude(i))
    length = c_p.shape[1]
    if noise is None:
        noise = _noise(rng, _lead(channels) + (cfg.nr + cfg.n(i) + cfg.n(j), length), noiseless)
    u = noise[..., : cfg.nr, :]
    n_i = noise[..., cfg.nr : cfg.nr + cfg.n(i), :]
    n_j = noise[..., cfg.nr + cfg.n(i) :, :]
    at_relay = transpose(h_i) @ c_p + u
    return Phase2Signals(i, c_p, h_j @ at_relay + n_j, h_i @ at_relay + n_i)


def run_phase3(cfg, channels, rng=None, *, noise=None, noiseless=False):
    return run_phase2(cfg, channels, rng, sender=2, noise=noise, noiseless=noiseless)


@dataclass(frozen=True)
class Phase4Signals:
    y_relay: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    gain: float

    def y(self, i):
        return self.y1 if i == 1 else self.y2


def run_phase4(cfg, channels, c1, c2, rng_relay=None, rng_user=None, *, noise=None, noiseless=False):
    """Two-way data relaying.

    ``Y_r = H_1^T C_1 + H_2^T C_2 + W_r`` at the relay, then
    ``Y_i = a H_i Y_r + W_i`` at each user.  ``noise`` may be given as a tuple
    ``(W_r, W_1, W_2)``.
    """
    a = relay_gain(cfg)
    t = cfg.t_slots
    lead = _lead(channels)
    if noise is None:
        w_r = _noise(rng_relay, lead + (cfg.nr, t), noiseless)
        w_users = _noise(rng_user, lead + (cfg.n1 + cfg.n2, t), noiseless)
        w_1, w_2 = w_users[..., : cfg.n1, :], w_users[..., cfg.n1 :, :]
    else:
        w_r, w_1, w_2 = noise
    y_r = transpose(channels.h1) @ c1 + transpose(channels.h2) @ c2 + w_r
    y1 = a * channels.h1 @ y_r + w_1
    y2 = a * channels.h2 @ y_r + w_2
    return Phase4Signals(y_r, y1, y2, a)

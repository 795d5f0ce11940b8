"""Linear orthogonal space-time block codes and Gray-labelled constellations."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch

__all__ = [
    "OstbcCode",
    "alamouti",
    "encode",
    "Constellation",
    "constellation",
    "map_bits",
    "demap_symbol",
    "CODES",
]


@dataclass(frozen=True, eq=False)
class OstbcCode:
    """Dispersion-matrix description of a linear OSTBC.

    A symbol vector ``c`` (length ``m_symbols``) is mapped to the
    ``n_tx x t_slots`` codeword ``sum_n Re(c_n) A_n + 1j * Im(c_n) B_n``.
    ``disp_a`` and ``disp_b`` have shape ``(m_symbols, n_tx, t_slots)``.
    """

    name: str
    n_tx: int
    t_slots: int
    m_symbols: int
    disp_a: np.ndarray = field(repr=False)
    disp_b: np.ndarray = field(repr=False)

    def __post_init__(self):
        for d in (self.disp_a, self.disp_b):
            if d.shape != (self.m_symbols, self.n_tx, self.t_slots):
                raise DimensionMismatch(f"dispersion shape {d.shape} does not match code dimensions")

    @property
    def rate(self):
        return self.m_symbols / self.t_slots


def alamouti():
    """The 2x2 Alamouti code ``[[c1, -c2*], [c2, c1*]]``."""
    a = np.array(
        [
            [[1, 0], [0, 1]],
            [[0, -1], [1, 0]],
        ],
        dtype=float,
    )
    b = np.array(
        [
            [[1, 0], [0, -1]],
            [[0, 1], [1, 0]],
        ],
        dtype=float,
    )
    return OstbcCode("alamouti", 2, 2, 2, a, b)


CODES = {"alamouti": alamouti}


def encode(code, symbols, symbol_energy=1.0):
    """Encode unit-energy ``symbols`` (shape ``(..., m_symbols)``).

    Symbols are scaled by ``sqrt(symbol_energy)`` before the dispersion sum.
    """
    symbols = np.asarray(symbols, dtype=np.complex128)
    if symbols.shape[-1] != code.m_symbols:
        raise DimensionMismatch(f"{code.name} takes {code.m_symbols} symbols, got {symbols.shape[-1]}")
    c = symbols * np.sqrt(symbol_energy)
    re = np.tensordot(c.real, code.disp_a, axes=([-1], [0]))
    im = np.tensordot(c.imag, code.disp_b, axes=([-1], [0]))
    return re + 1j * im


def _gray(k):
    return k ^ (k >> 1)


@dataclass(frozen=True, eq=False)
class Constellation:
    """Unit-average-energy constellation with Gray bit labels.

    ``labels[i]`` is the integer bit label of ``points[i]``; bit 0 of the
    label's binary expansion (most significant first) is the first mapped bit.
    """

    kind: str
    order: int
    points: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)

    @property
    def bits_per_symbol(self):
        return int(np.log2(self.order))

    @property
    def name(self):
        return "bpsk" if self.kind == "psk" and self.order == 2 else f"{self.order}{self.kind}"

    def index_of_label(self):
        inv = np.empty(self.order, dtype=np.int64)
        inv[self.labels] = np.arange(self.order)
        return inv

    def label_bits(self):
        """``(order, bits_per_symbol)`` array of label bits, MSB first."""
        k = self.bits_per_symbol
        shifts = np.arange(k - 1, -1, -1)
        return (self.labels[:, None] >> shifts) & 1


def _psk(m):
    i = np.arange(m)
    offset = 0.0 if m == 2 else np.pi / m
    points = np.exp(1j * (2 * np.pi * i / m + offset))
    if m == 2:
        points = np.array([1.0 + 0j, -1.0 + 0j])
    return Constellation("psk", m, points, _gray(i).astype(np.int64))


def _qam(m):
    side = int(round(np.sqrt(m)))
    half = int(np.log2(side))
    k = np.arange(side)
    level = 2 * k - side + 1
    ki, kq = np.meshgrid(k, k, indexing="ij")
    points = (level[ki] + 1j * level[kq]).ravel()
    labels = ((_gray(ki) << half) | _gray(kq)).ravel().astype(np.int64)
    points = points / np.sqrt(2 * (m - 1) / 3)
    return Constellation("qam", m, points.astype(np.complex128), labels)


_PSK_ORDERS = (2, 4, 8, 16)
_QAM_ORDERS = (4, 16, 64)


def constellation(name):
    """Build a constellation from a name such as ``bpsk``, ``qpsk``, ``8psk`` or ``16qam``."""
    key = str(name).strip().lower().replace("-", "")
    aliases = {"bpsk": "2psk", "qpsk": "4psk"}
    key = aliases.get(key, key)
    for kind, orders, build in (("psk", _PSK_ORDERS, _psk), ("qam", _QAM_ORDERS, _qam)):
        if key.endswith(kind):
            try:
                m = int(key[: -len(kind)])
            except ValueError:
                break
            if m not in orders:
                raise ValueError(f"unsupported {kind.upper()} order {m}; choose from {orders}")
            return build(m)
    raise ValueError(f"unknown constellation {name!r}")


def map_bits(const, bits):
    """Map bits (``(..., n*k)`` array of 0/1) to constellation indices ``(..., n)``."""
    bits = np.asarray(bits, dtype=np.int64)
    k = const.bits_per_symbol
    if bits.shape[-1] % k:
        raise DimensionMismatch(f"bit count {bits.shape[-1]} not a multiple of {k}")
    groups = bits.reshape(bits.shape[:-1] + (-1, k))
    weights = 1 << np.arange(k - 1, -1, -1)
    labels = groups @ weights
    return const.index_of_label()[labels]


def demap_symbol(const, point):
    """Index of the nearest constellation point; ties go to the lowest index."""
    point = np.asarray(point, dtype=np.complex128)
    d = np.abs(point[..., None] - const.points) ** 2
    return np.argmin(d, axis=-1)

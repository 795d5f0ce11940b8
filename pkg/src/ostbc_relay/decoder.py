"""Decoding the partner's OSTBC codeword at one user.

Both decoders first cancel the user's own codeword (known side information)
and whiten the observation:

    Y~ = W (Y - a G^_i C_i),   X = a W G^_ij,   W = (a^2 H^ H^^H + I)^(-1/2)

after which the partner's codeword ``C_j`` is found either by exhaustive
search over all candidate codewords or symbol by symbol using the
orthogonality of the code.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import kernels
from .errors import SearchSpaceTooLarge
from .estimation import CsiEstimates, build_whitener, whitener_full
from .linalg import vec
from .ostbc import demap_symbol, encode

__all__ = [
    "DecoderInput",
    "MAX_CANDIDATES",
    "whitened_observation",
    "candidate_codewords",
    "decode_exhaustive",
    "decode_symbolwise",
    "residual_norm",
    "vec_metric",
]

MAX_CANDIDATES = 65536


@dataclass(frozen=True)
class DecoderInput:
    """Everything a user may use when decoding.

    ``y`` is the ``N_i x T`` phase-4 reception (optionally with a leading trial
    axis), ``csi`` the user's channel knowledge (estimates, or exact channels
    in the perfect-CSI mode), ``own_codeword`` the user's transmitted ``C_i``.
    ``symbol_energy`` is the partner's per-symbol energy.
    """

    y: np.ndarray
    csi: CsiEstimates
    own_codeword: np.ndarray
    a: float
    symbol_energy: float


def _batched(arr):
    arr = np.asarray(arr, dtype=np.complex128)
    return arr if arr.ndim == 3 else arr[None]


def whitened_observation(inp):
    """Return ``(Y~, X)`` with a leading trial axis."""
    y = _batched(inp.y)
    c_own = _batched(inp.own_codeword)
    h_hat = _batched(inp.csi.h_hat)
    g_own = _batched(inp.csi.g_own)
    g_cross = _batched(inp.csi.g_cross)
    w = build_whitener(h_hat, inp.a)
    y_clean = w @ (y - inp.a * (g_own @ c_own))
    x = inp.a * (w @ g_cross)
    return y_clean, x


def candidate_codewords(code, const, symbol_energy):
    """All codewords in lexicographic order of their symbol-index tuples.

    Returns ``(indices, codewords)`` with shapes ``(K, m_symbols)`` and
    ``(K, n_tx, t_slots)``.
    """
    k = const.order**code.m_symbols
    if k > MAX_CANDIDATES:
        raise SearchSpaceTooLarge(
            f"{const.name} with {code.m_symbols} symbols gives {k} candidates (limit {MAX_CANDIDATES})"
        )
    idx = np.array(list(product(range(const.order), repeat=code.m_symbols)), dtype=np.int64)
    return idx, encode(code, const.points[idx], symbol_energy)


def decode_exhaustive(inp, const, code):
    """Minimum whitened-residual codeword; returns symbol indices ``(B, m_symbols)``.

    Ties resolve to the lowest lexicographic index tuple.
    """
    idx, cands = candidate_codewords(code, const, inp.symbol_energy)
    y_clean, x = whitened_observation(inp)
    best, _ = kernels.ml_search(y_clean, x, cands)
    return idx[best]


def decode_symbolwise(inp, const, code):
    """Per-symbol decisions from the linear OSTBC statistics; ``(B, m_symbols)``."""
    y_clean, x = whitened_observation(inp)
    stats, norm2 = kernels.symbol_stats(y_clean, x, code.disp_a, code.disp_b)
    z = stats / (norm2[:, None] * np.sqrt(inp.symbol_energy))
    return demap_symbol(const, z)


def residual_norm(inp, const, code, symbols):
    """``||Y~ - X C(symbols)||_F^2`` per trial, for tie analysis."""
    y_clean, x = whitened_observation(inp)
    c = encode(code, const.points[np.asarray(symbols)], inp.symbol_energy)
    r = y_clean - x @ _batched(c)
    return np.sum(np.abs(r) ** 2, axis=(1, 2))


def vec_metric(y, csi, own_codeword, cand_codeword, a):
    """Single-trial metric in vectorised form.

    ``||K^^(-1/2) (vec Y - a (I kron G^_i) vec C_i - a (I kron G^_ij) vec C_j)||^2``
    with the full ``N T x N T`` whitener; an independent route to the value
    :func:`residual_norm` computes through the per-column block structure.
    """
    t = y.shape[-1]
    eye_t = np.eye(t)
    k_half_inv = whitener_full(csi.h_hat, a, t)
    r = vec(y) - a * np.kron(eye_t, csi.g_own) @ vec(own_codeword) - a * np.kron(eye_t, csi.g_cross) @ vec(cand_codeword)
    return float(np.sum(np.abs(k_half_inv @ r) ** 2))

"""Pure numpy implementations of the hot per-trial kernels.

These are the reference versions; ``_ckernels.pyx`` mirrors them loop by loop.
All inputs carry a leading trial axis ``B``.
"""

import numpy as np

# Upper bound on complex temporaries materialised by ml_search at once.
_CHUNK_ELEMS = 1 << 22


def ml_search(y, x, candidates):
    """Exhaustive minimum-distance search.

    Parameters
    ----------
    y : (B, N, T) complex
        Whitened, self-interference-cancelled observations.
    x : (B, N, Nj) complex
        Whitened effective channels.
    candidates : (K, Nj, T) complex
        All candidate codewords, in tie-break order.

    Returns
    -------
    index : (B,) int64
        Position of the first minimiser for each trial.
    metric : (B,) float64
        ``||y - x c||_F^2`` at that candidate.
    """
    y = np.ascontiguousarray(y, dtype=np.complex128)
    x = np.ascontiguousarray(x, dtype=np.complex128)
    candidates = np.ascontiguousarray(candidates, dtype=np.complex128)
    n_trials = y.shape[0]
    k_total = candidates.shape[0]
    per_cand = max(1, n_trials * y.shape[1] * y.shape[2])
    step = max(1, _CHUNK_ELEMS // per_cand)
    best = np.full(n_trials, np.inf)
    index = np.zeros(n_trials, dtype=np.int64)
    for start in range(0, k_total, step):
        block = candidates[start : start + step]
        xc = np.einsum("bnj,kjt->bknt", x, block)
        r = y[:, None, :, :] - xc
        metric = np.sum(r.real**2 + r.imag**2, axis=(2, 3))
        local = np.argmin(metric, axis=1)
        val = metric[np.arange(n_trials), local]
        better = val < best
        best[better] = val[better]
        index[better] = local[better] + start
    return index, best


def symbol_stats(y, x, disp_a, disp_b):
    """Linear OSTBC decision statistics.

    Returns ``(stats, norm2)`` where
    ``stats[b, n] = Re Tr(Y^H X A_n) - 1j * Im Tr(Y^H X B_n)`` and
    ``norm2[b] = ||X||_F^2``.
    """
    p = np.einsum("bnt,bnj->btj", np.conj(y), x)
    tr_a = np.einsum("btj,mjt->bm", p, disp_a)
    tr_b = np.einsum("btj,mjt->bm", p, disp_b)
    norm2 = np.sum(x.real**2 + x.imag**2, axis=(1, 2))
    return tr_a.real - 1j * tr_b.imag, norm2


def snr_trace(h_i, h_j, z1, z2):
    """``Tr{G^H (z1 I + z2 H_i H_i^H)^-1 G}`` with ``G = H_i H_j^T``, per trial."""
    n = h_i.shape[1]
    g = h_i @ np.swapaxes(h_j, 1, 2)
    q = z1 * np.eye(n) + z2 * (h_i @ np.conj(np.swapaxes(h_i, 1, 2)))
    sol = np.linalg.solve(q, g)
    return np.sum((np.conj(g) * sol).real, axis=(1, 2))

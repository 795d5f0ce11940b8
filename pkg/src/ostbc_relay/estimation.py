"""Channel estimation from the three training phases.

Phase 1 gives each user an estimate of its own relay channel ``H_i``; phases
2 and 3 give the cascaded channels ``G_i = H_i H_i^T`` (own pilots looped back
through the relay) and ``G_ij = H_i H_j^T`` (partner's pilots).
"""

from dataclasses import dataclass

import numpy as np

from .linalg import herm, herm_inv_sqrt, inverse, kron, solve, transpose, vec

__all__ = [
    "CsiEstimates",
    "estimate_individual",
    "estimate_cascaded",
    "estimate_cascaded_direct",
    "cascaded_error_form",
    "build_whitener",
    "whitener_full",
    "estimate_user_csi",
    "exact_csi",
]


@dataclass(frozen=True)
class CsiEstimates:
    """What User-i knows after training (matrix forms; ``*_vec`` give ``vec``)."""

    h_hat: np.ndarray
    g_own: np.ndarray
    g_cross: np.ndarray

    @property
    def g_own_vec(self):
        return vec(self.g_own)

    @property
    def g_cross_vec(self):
        return vec(self.g_cross)

    def k_hat(self, a, t_slots):
        """``a^2 (I_T kron H^ H^^H) + I`` (materialised; prefer :func:`build_whitener`)."""
        q = self.h_hat @ herm(self.h_hat)
        n = q.shape[-1]
        return a * a * kron(np.eye(t_slots), q) + np.eye(n * t_slots)


def estimate_individual(received, pilot):
    """Least-squares/ML estimate ``R S^H (S S^H)^-1`` of ``H_i`` from phase 1."""
    gram = pilot @ herm(pilot)
    # R S^H G^-1 = (G^-H S R^H)^H; G is Hermitian.
    return herm(solve(gram, pilot @ herm(received)))


def estimate_cascaded(received, pilot):
    """Whitened least-squares estimate of a cascaded channel, as a matrix.

    The noise covariance ``I_L kron (H H^H) + I`` is block diagonal with
    identical blocks, so the generalised least-squares weights cancel and the
    estimate reduces to ``R C^H (C C^H)^-1`` exactly.  See
    :func:`estimate_cascaded_direct` for the literal Kronecker evaluation.
    """
    return estimate_individual(received, pilot)


def estimate_cascaded_direct(received, pilot, h_hat_local):
    """Literal GLS evaluation with the full ``K~ = I_L kron H^H^^H + I``.

    Returns ``vec(G^)`` as an ``(N_i N_j, 1)`` column.  Single trial only;
    this exists as an algebraic oracle for :func:`estimate_cascaded`.
    """
    n_rx = received.shape[-2]
    length = pilot.shape[-1]
    k_tilde = kron(np.eye(length), h_hat_local @ herm(h_hat_local)) + np.eye(length * n_rx)
    k_inv = inverse(k_tilde)
    left = kron(np.conj(pilot), np.eye(n_rx))
    right = kron(transpose(pilot), np.eye(n_rx))
    normal = left @ k_inv @ right
    return solve(normal, left @ k_inv @ vec(received))


def cascaded_error_form(g_true, pilot, h_hat_local, n_white):
    """``g + ((C C^H)^-T C^* kron I) K~^{1/2} n`` for a standard normal ``n``.

    With ``C C^H = I`` this is ``g + (C^* kron I) K~^{1/2} n``.  Feeding
    ``n = K~^{-1/2} vec(noise)`` reproduces the direct estimate exactly.
    """
    n_rx = h_hat_local.shape[-2]
    length = pilot.shape[-1]
    k_tilde = kron(np.eye(length), h_hat_local @ herm(h_hat_local)) + np.eye(length * n_rx)
    w, v = np.linalg.eigh(k_tilde)
    k_half = (v * np.sqrt(w)[None, :]) @ herm(v)
    gram_inv_t = transpose(inverse(pilot @ herm(pilot)))
    op = kron(gram_inv_t @ np.conj(pilot), np.eye(n_rx))
    return vec(g_true) + op @ k_half @ n_white


def build_whitener(h_hat, a):
    """``(a^2 H^ H^^H + I)^(-1/2)``, the per-column block of ``K^^(-1/2)``.

    ``K^ = a^2 (I_T kron H^ H^^H) + I`` is block diagonal, so whitening the
    ``N_i x T`` observation is ``W @ Y`` with this ``N_i x N_i`` matrix.
    """
    n = h_hat.shape[-2]
    return herm_inv_sqrt(a * a * (h_hat @ herm(h_hat)) + np.eye(n))


def whitener_full(h_hat, a, t_slots):
    """The full ``N_i T x N_i T`` inverse square root (reference only)."""
    n = h_hat.shape[-2]
    k = a * a * kron(np.eye(t_slots), h_hat @ herm(h_hat)) + np.eye(n * t_slots)
    return herm_inv_sqrt(k)


def estimate_user_csi(user, phase1, own_phase, cross_phase):
    """Assemble User-``user``'s estimates from the phase signals.

    ``own_phase`` is the phase in which ``user`` sent pilots (its looped-back
    reception gives ``G_i``); ``cross_phase`` is the partner's training phase
    (gives ``G_ij``).
    """
    if own_phase.sender != user or cross_phase.sender == user:
        raise ValueError("phase roles do not match the decoding user")
    h_hat = estimate_individual(phase1.r(user), phase1.pilot)
    g_own = estimate_cascaded(own_phase.r_self, own_phase.pilot)
    g_cross = estimate_cascaded(cross_phase.r_other, cross_phase.pilot)
    return CsiEstimates(h_hat, g_own, g_cross)


def exact_csi(channels, user):
    j = 3 - user
    return CsiEstimates(channels.h(user), channels.g_own(user), channels.g_cross(user, j))

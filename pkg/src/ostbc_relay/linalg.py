"""Dense complex matrix helpers.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` in the default
row-major layout.  Every function accepts a leading batch shape, so a stack of
per-trial matrices ``(B, n, m)`` is handled the same way as a single ``(n, m)``
matrix.  ``vec`` always uses column-major (Fortran) stacking so that
``vec(A X B) == kron(B.T, A) @ vec(X)``.
"""

import warnings

import numpy as np
import scipy.linalg

from .errors import NotHermitian, Singular

__all__ = [
    "as_complex",
    "kron",
    "vec",
    "unvec",
    "herm",
    "transpose",
    "herm_inv_sqrt",
    "inverse",
    "solve",
    "matmul",
    "trace",
    "frobenius_norm",
    "dft_unitary",
]

HERMITIAN_RTOL = 1e-8
SINGULAR_RTOL = 1e-12


def as_complex(a):
    return np.asarray(a, dtype=np.complex128)


def transpose(a):
    """Swap the two trailing axes (plain transpose, no conjugation)."""
    return np.swapaxes(a, -1, -2)


def herm(a):
    """Conjugate transpose over the two trailing axes."""
    return np.conj(np.swapaxes(a, -1, -2))


conj_transpose = herm


def kron(a, b):
    """Kronecker product of the trailing matrices, broadcasting batch axes."""
    a = as_complex(a)
    b = as_complex(b)
    ra, ca = a.shape[-2:]
    rb, cb = b.shape[-2:]
    out = a[..., :, None, :, None] * b[..., None, :, None, :]
    return out.reshape(out.shape[:-4] + (ra * rb, ca * cb))


def vec(a):
    """Stack the columns of ``a`` into an ``(rows*cols, 1)`` column vector."""
    a = as_complex(a)
    r, c = a.shape[-2:]
    return transpose(a).reshape(a.shape[:-2] + (r * c, 1))


def unvec(v, rows, cols):
    """Inverse of :func:`vec`."""
    v = as_complex(v)
    return transpose(v.reshape(v.shape[:-2] + (cols, rows)))


def matmul(a, b):
    return as_complex(a) @ as_complex(b)


def trace(a):
    return np.trace(a, axis1=-2, axis2=-1)


def frobenius_norm(a):
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))


def _check_hermitian(a):
    dev = frobenius_norm(a - herm(a))
    scale = frobenius_norm(a)
    bad = dev > HERMITIAN_RTOL * np.where(scale > 0, scale, 1.0)
    if np.any(bad):
        worst = float(np.max(dev / np.where(scale > 0, scale, 1.0)))
        raise NotHermitian(f"relative anti-Hermitian part {worst:.3e} exceeds {HERMITIAN_RTOL}")


def herm_inv_sqrt(a, eps=1e-12):
    """Return ``a^(-1/2)`` for Hermitian positive semi-definite ``a``.

    Eigenvalues are clamped from below at ``eps`` before the inverse square
    root is taken, so the result is finite for singular inputs.  The returned
    matrix is Hermitian and satisfies ``M a M^H = I`` on the eigenspace with
    eigenvalues above ``eps``.

    Raises
    ------
    NotHermitian
        If ``||a - a^H||_F / ||a||_F > 1e-8``.
    """
    a = as_complex(a)
    _check_hermitian(a)
    w, v = np.linalg.eigh(0.5 * (a + herm(a)))
    w = np.maximum(w, eps)
    return (v * (1.0 / np.sqrt(w))[..., None, :]) @ herm(v)


def _check_pivots(a):
    a = as_complex(a)
    flat = a.reshape((-1,) + a.shape[-2:])
    for m in flat:
        with warnings.catch_warnings():
            # exact zero pivots are reported below as Singular
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, _ = scipy.linalg.lu_factor(m, check_finite=True)
        pivots = np.abs(np.diag(lu))
        limit = SINGULAR_RTOL * np.linalg.norm(m)
        if pivots.min() <= limit:
            raise Singular(f"pivot {pivots.min():.3e} below {limit:.3e}")


def inverse(a):
    """Inverse via partially pivoted LU.

    Raises
    ------
    Singular
        If a pivot magnitude falls below ``1e-12 * ||a||_F``.
    """
    a = as_complex(a)
    _check_pivots(a)
    return np.linalg.inv(a)


def solve(a, b):
    """Solve ``a x = b`` with the same singularity guard as :func:`inverse`."""
    a = as_complex(a)
    _check_pivots(a)
    return np.linalg.solve(a, as_complex(b))


def dft_unitary(n):
    """Normalised ``n``-point DFT matrix, ``F F^H = I``."""
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)

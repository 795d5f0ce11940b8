"""Special functions used by the analytical performance expressions.

Gamma, log-gamma and digamma come from the standard library and SciPy.  The
Tricomi confluent hypergeometric function ``U(a, b, z)`` is evaluated from its
integral representation

    U(a, b, z) = 1/Gamma(a) * int_0^inf exp(-z t) t^(a-1) (1 + t)^(b-a-1) dt,

integrated in the variable ``u = ln t`` so that both the algebraic behaviour
near ``t = 0`` and the exponential tail become smooth on a finite range.
"""

import math

import numpy as np
from scipy import integrate
from scipy import special as _sp

from .errors import DomainError

__all__ = [
    "EULER_GAMMA",
    "gamma_fn",
    "ln_gamma",
    "digamma",
    "tricomi_u",
    "tricomi_u_small_z",
]

EULER_GAMMA = 0.57721566490153286061

# Integrand is below exp(-_TAIL) of its scale outside the integration window.
_TAIL = 46.0


def _positive(x, name):
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"{name} requires a finite positive argument, got {x!r}")
    return x


def gamma_fn(x):
    """Gamma function for ``x > 0``."""
    return math.gamma(_positive(x, "gamma_fn"))


def ln_gamma(x):
    """``ln Gamma(x)`` for ``x > 0``."""
    return math.lgamma(_positive(x, "ln_gamma"))


def digamma(x):
    """Digamma ``psi(x)`` for ``x > 0``."""
    return float(_sp.digamma(_positive(x, "digamma")))


def _log_integrand(u, a, b, z):
    # log of exp(-z t) t^a (1+t)^(b-a-1) with t = e^u (the dt = t du factor is in t^a)
    return -z * np.exp(u) + a * u + (b - a - 1.0) * np.logaddexp(0.0, u)


def tricomi_u(a, b, z, rtol=1e-12):
    """Confluent hypergeometric function of the second kind ``U(a, b, z)``.

    Parameters
    ----------
    a : float
        Must be positive.
    b : float
    z : float
        Must be positive.
    rtol : float
        Relative tolerance requested from the adaptive quadrature.

    Raises
    ------
    DomainError
        For ``a <= 0`` or ``z <= 0``.
    """
    a = _positive(a, "tricomi_u (a)")
    z = _positive(z, "tricomi_u (z)")
    b = float(b)
    # Window: left end where t^a is negligible, right end where exp(-z t) is.
    u_small = min(0.0, math.log(1.0 / z))
    u_lo = u_small - _TAIL / a
    u_hi = math.log((_TAIL + 2.0 * abs(b) + 2.0 * a) / z) + 1.0
    # Peak of the log-integrand (for the shift) and breakpoints.
    grid = np.linspace(u_lo, u_hi, 2049)
    logs = _log_integrand(grid, a, b, z)
    shift = float(np.max(logs))
    u_peak = float(grid[np.argmax(logs)])
    points = sorted({p for p in (0.0, math.log(1.0 / z), u_peak) if u_lo < p < u_hi})

    def f(u):
        return math.exp(_log_integrand(u, a, b, z) - shift)

    val, err = integrate.quad(f, u_lo, u_hi, points=points, epsabs=0.0, epsrel=rtol, limit=400)
    return val * math.exp(shift - math.lgamma(a))


def tricomi_u_small_z(a, b, z):
    """Leading term of ``U(a, b, z)`` as ``z -> 0``.

    ``b > 1``: ``Gamma(b-1)/Gamma(a) z^(1-b)``;
    ``b == 1``: ``-(ln z + psi(a) + 2 gamma_E)/Gamma(a)``;
    ``b < 1``: ``Gamma(1-b)/Gamma(a-b+1)``.

    For non-integer ``b`` in ``(0, 2)`` the neglected term is of relative
    order ``z^|1-b|``; otherwise it is ``O(z)`` up to a logarithm.
    """
    a = _positive(a, "tricomi_u_small_z (a)")
    z = _positive(z, "tricomi_u_small_z (z)")
    if b > 1:
        return math.exp(math.lgamma(b - 1.0) - math.lgamma(a)) * z ** (1.0 - b)
    if b == 1:
        return -(math.log(z) + digamma(a) + 2.0 * EULER_GAMMA) / math.gamma(a)
    # Gamma(1-b) may be huge; form the ratio in log space (both arguments > 0).
    return math.exp(math.lgamma(1.0 - b) - math.lgamma(a - b + 1.0))

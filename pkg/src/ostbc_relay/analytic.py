"""Analytical error performance of the two-way relay link with estimated CSI.

The received SNR of the partner's symbols at User-i, after whitening with the
estimated channels and ignoring the products of estimation errors, is

    gamma = alpha_j gamma_bar_j a^2 Tr{G_ij^H (Z1 I + Z2 H_i H_i^H)^-1 G_ij}.

Its moment generating function is ``det J(s) / kappa`` with ``J`` a ``q x q``
Hankel matrix.  Each Hankel entry has two independent evaluations:

route A
    direct quadrature of the eigenvalue integral
    ``J_nu = int_0^inf l^(nu-1) e^-l ((1 + c l) / (1 + c w l))^Nj dl``
    with ``c = Z2/Z1``, ``d = a^2 s alpha gamma_bar / Z2``, ``w = 1 + d``;
route B
    the finite sum ``Gamma(nu) / (c^nu w^(nu+Nj)) sum_k C(Nj,k) d^k
    U(nu, nu+1-k, 1/(c w))`` of Tricomi functions.

SER integrals use route A (vectorised) and spot-check it against route B.
"""

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import CrossCheckFailure, InsufficientData, Unsupported
from .special import EULER_GAMMA, digamma, tricomi_u

__all__ = [
    "SnrModel",
    "MgfEvaluator",
    "hankel_entry_quadrature",
    "hankel_entry_closed_form",
    "mgf",
    "instantaneous_snr",
    "ser_mpsk",
    "ser_mqam",
    "ber_psk",
    "error_rates",
    "error_rates_from_mgf",
    "bpsk_q1_closed_form",
    "bpsk_q1_inner_integral",
    "Diversity",
    "diversity_order",
    "slope_estimate",
    "mgf_asymptotic_q1",
    "db_to_linear",
]

CROSS_CHECK_RTOL = 1e-6


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class SnrModel:
    """Parameters of the post-detection SNR at one user.

    ``p``/``q`` are the larger/smaller of the relay and user antenna counts,
    ``n_j`` the partner's antenna count, ``alpha_j = 1/(R_j N_j)``.
    """

    p: int
    q: int
    n_j: int
    alpha_j: float
    gamma_bar_j: float
    a: float
    z1: float
    z2: float

    @classmethod
    def build(cls, n_i, n_r, n_j, gamma_bar, a=1.0, n_p_i=None, n_p_j=None, rate=1.0):
        """Model for User-i decoding User-j.

        ``n_p_i = n_p_j = None`` gives the perfect-CSI model (``Z1 = 1``,
        ``Z2 = a^2``).
        """
        if (n_p_i is None) != (n_p_j is None):
            raise ValueError("give both training lengths or neither")
        inv = 0.0 if n_p_i is None else 1.0 / n_p_i + 1.0 / n_p_j
        return cls(
            p=max(n_r, n_i),
            q=min(n_r, n_i),
            n_j=n_j,
            alpha_j=1.0 / (rate * n_j),
            gamma_bar_j=float(gamma_bar),
            a=float(a),
            z1=1.0 + a * a * inv,
            z2=a * a * (1.0 + inv),
        )

    @classmethod
    def from_config(cls, cfg, user=1, perfect=False):
        from .protocol import relay_gain

        j = 3 - user
        n_p = (None, None) if perfect else (cfg.n_p(user), cfg.n_p(j))
        return cls.build(
            cfg.n(user), cfg.nr, cfg.n(j), cfg.gamma_bar(j), relay_gain(cfg), *n_p, rate=cfg.code.rate
        )

    def __post_init__(self):
        if self.q < 1 or self.p < self.q or self.n_j < 1:
            raise ValueError(f"invalid antenna configuration p={self.p}, q={self.q}, n_j={self.n_j}")
        if not (self.z1 >= 1.0 and self.z2 > 0.0):
            raise ValueError("need z1 >= 1 and z2 > 0")

    @property
    def kappa(self):
        return math.prod(math.gamma(self.p - l + 1) * math.gamma(self.q - l + 1) for l in range(1, self.q + 1))

    @property
    def c(self):
        return self.z2 / self.z1

    def d(self, s):
        return self.a**2 * np.asarray(s, dtype=float) * self.alpha_j * self.gamma_bar_j / self.z2

    def nus(self):
        """Distinct ``nu`` values of the Hankel matrix, ``t + v + p - q - 1`` for ``t + v = 2..2q``."""
        return [m + self.p - self.q - 1 for m in range(2, 2 * self.q + 1)]

    def with_gamma_bar(self, gamma_bar):
        return replace(self, gamma_bar_j=float(gamma_bar))


# Route A quadrature rule --------------------------------------------------

_GL_NODES = 20
_GL_PANELS = 128
_LAGUERRE_NODES = 120
_LOG_WINDOW = 40.0


@lru_cache(maxsize=None)
def _rules():
    x, w = np.polynomial.legendre.leggauss(_GL_NODES)
    # composite rule on [0, 1]
    edges = np.linspace(0.0, 1.0, _GL_PANELS + 1)
    h = np.diff(edges)[:, None]
    t = (edges[:-1, None] + 0.5 * h * (x[None, :] + 1.0)).ravel()
    tw = (0.5 * h * w[None, :]).ravel()
    xl, wl = np.polynomial.laguerre.laggauss(_LAGUERRE_NODES)
    return t, tw, xl, wl


def _log_ratio(lam, c, cw, n_j):
    # n_j * ln((1 + c l) / (1 + c w l))
    return n_j * (np.log1p(c * lam) - np.log1p(cw * lam))


def hankel_entry_quadrature(model, nu, s):
    """Route A: ``J_nu(s)`` by fixed-node quadrature, vectorised over ``s``.

    ``[0, 1]`` is integrated in ``u = ln l`` with composite Gauss-Legendre
    (the window reaches below ``1/(c w)``, where the ratio factor turns
    over); ``[1, inf)`` uses Gauss-Laguerre after the shift ``l = 1 + x``.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    t, tw, xl, wl = _rules()
    c = model.c
    cw = c * (1.0 + model.d(s))[:, None]
    u_lo = np.minimum(0.0, -np.log(cw)) - _LOG_WINDOW / nu
    u = u_lo * (1.0 - t[None, :])
    lam = np.exp(u)
    head = np.sum(tw * (-u_lo) * np.exp(nu * u - lam + _log_ratio(lam, c, cw, model.n_j)), axis=1)
    lam = 1.0 + xl[None, :]
    tail = math.exp(-1.0) * np.sum(wl * np.exp((nu - 1) * np.log(lam) + _log_ratio(lam, c, cw, model.n_j)), axis=1)
    return head + tail


def hankel_entry_closed_form(model, nu, s):
    """Route B: ``J_nu(s)`` as a binomial sum of Tricomi ``U`` values (scalar ``s``)."""
    c = model.c
    d = float(model.d(s))
    w = 1.0 + d
    z = 1.0 / (c * w)
    total = 0.0
    for k in range(model.n_j + 1):
        if k and d == 0.0:
            break
        total += math.comb(model.n_j, k) * d**k * tricomi_u(nu, nu + 1 - k, z)
    return math.exp(math.lgamma(nu) - nu * math.log(c) - (nu + model.n_j) * math.log(w)) * total


def _det_from_entries(model, entries):
    # entries[..., m] holds J for t + v = m + 2
    q = model.q
    if q == 1:
        return entries[..., 0]
    idx = np.add.outer(np.arange(q), np.arange(q))
    return np.linalg.det(entries[..., idx])


class MgfEvaluator:
    """Moment generating function ``M(s) = det J(s) / kappa`` of one model.

    Calling the evaluator uses route A on an array of ``s``.
    :meth:`checked` evaluates both routes at scalar ``s`` and raises
    :class:`CrossCheckFailure` when any Hankel entry disagrees by more than
    ``rtol``.
    """

    def __init__(self, model, rtol=CROSS_CHECK_RTOL):
        self.model = model
        self.rtol = rtol
        self._kappa = model.kappa

    def entries(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s < 0):
            raise ValueError("the m.g.f. is evaluated at s >= 0")
        return np.stack([hankel_entry_quadrature(self.model, nu, s) for nu in self.model.nus()], axis=-1)

    def __call__(self, s):
        scalar = np.ndim(s) == 0
        out = _det_from_entries(self.model, self.entries(s)) / self._kappa
        return float(out[0]) if scalar else out

    def cross_check(self, s):
        """Return the worst relative route-A/route-B gap over the Hankel entries at ``s``."""
        a_vals = self.entries(s)[0]
        worst = 0.0
        for k, nu in enumerate(self.model.nus()):
            b_val = hankel_entry_closed_form(self.model, nu, s)
            gap = abs(a_vals[k] - b_val) / abs(a_vals[k])
            worst = max(worst, gap)
            if not gap <= self.rtol:
                raise CrossCheckFailure(
                    f"Hankel entry nu={nu} at s={s}: quadrature {a_vals[k]!r} vs closed form {b_val!r}"
                )
        return worst

    def checked(self, s):
        self.cross_check(s)
        return self(float(s))


def mgf(model, s, cross_check=True):
    """``E[exp(-s gamma)]``; by default both Hankel routes must agree."""
    ev = MgfEvaluator(model)
    return ev.checked(s) if cross_check else ev(s)


def instantaneous_snr(h_i, h_j, model):
    """Per-trial ``gamma`` from channel draws ``h_i`` (B, N_i, Nr) and ``h_j`` (B, N_j, Nr)."""
    h_i = np.asarray(h_i, dtype=np.complex128)
    h_j = np.asarray(h_j, dtype=np.complex128)
    single = h_i.ndim == 2
    if single:
        h_i, h_j = h_i[None], h_j[None]
    tr = kernels.snr_trace(h_i, h_j, model.z1, model.z2)
    out = model.alpha_j * model.gamma_bar_j * model.a**2 * tr
    return float(out[0]) if single else out


# SER integrals -------------------------------------------------------------

_SER_NODES = 16
_SER_RTOL = 1e-10
_SER_ATOL = 1e-15
_SPOT_CHECKS = 3


@lru_cache(maxsize=None)
def _legendre(n):
    return np.polynomial.legendre.leggauss(n)


def _gl(f, lo, hi):
    x, w = _legendre(_SER_NODES)
    half = 0.5 * (hi - lo)
    return half * float(np.dot(w, f(lo + half * (x + 1.0))))


def _adaptive(f, lo, hi, rtol=_SER_RTOL, atol=_SER_ATOL):
    """Adaptive Gauss-Legendre by bisection.

    An interval is accepted when the one-panel and two-panel estimates
    differ by less than its share of the tolerance.
    """
    whole = _gl(f, lo, hi)
    tol = max(atol, rtol * abs(whole))
    span = hi - lo
    total = 0.0
    stack = [(lo, hi, whole, 0)]
    while stack:
        a, b, est, depth = stack.pop()
        m = 0.5 * (a + b)
        left, right = _gl(f, a, m), _gl(f, m, b)
        if abs(left + right - est) <= tol * (b - a) / span or depth >= 40:
            total += left + right
        else:
            stack.append((m, b, right, depth + 1))
            stack.append((a, m, left, depth + 1))
    return total


def _mgf_integral(fn, g, lo, hi):
    def f(theta):
        return fn(g / np.sin(theta) ** 2)

    return _adaptive(f, lo, hi)


def _spot_check(ev, g):
    # route A drives the integral; confirm it against route B along the path
    for theta in np.linspace(0.15, 1.5, _SPOT_CHECKS):
        ev.cross_check(g / math.sin(theta) ** 2)


def _evaluator(model, gamma_bar):
    if gamma_bar is not None:
        model = model.with_gamma_bar(gamma_bar)
    return MgfEvaluator(model)


def _psk_ser(fn, m):
    g = math.sin(math.pi / m) ** 2
    upper = math.pi * (m - 1) / m
    total = _mgf_integral(fn, g, 0.0, min(upper, math.pi / 2))
    if upper > math.pi / 2:
        # split at the integrand's flat maximum
        total += _mgf_integral(fn, g, math.pi / 2, upper)
    return total / math.pi


def _qam_ser(fn, m):
    g = 1.5 / (m - 1)
    r = 1.0 - 1.0 / math.sqrt(m)
    i1 = _mgf_integral(fn, g, 0.0, math.pi / 2)
    i2 = _mgf_integral(fn, g, 0.0, math.pi / 4)
    return 4.0 / math.pi * r * i1 - 4.0 / math.pi * r * r * i2


def _qpsk_ber(fn):
    return _mgf_integral(fn, 0.5, 0.0, math.pi / 2) / math.pi


def ser_mpsk(model, m, gamma_bar=None, cross_check=True):
    """M-PSK SER ``(1/pi) int_0^{pi (M-1)/M} M(sin^2(pi/M) / sin^2 t) dt``."""
    if m not in (2, 4, 8, 16):
        raise ValueError(f"M-PSK order {m} not supported")
    ev = _evaluator(model, gamma_bar)
    if cross_check:
        _spot_check(ev, math.sin(math.pi / m) ** 2)
    return _psk_ser(ev, m)


def ser_mqam(model, m, gamma_bar=None, cross_check=True):
    """Square M-QAM SER with ``g = 3 / (2 (M - 1))``."""
    if m not in (4, 16, 64):
        raise ValueError(f"M-QAM order {m} not supported")
    ev = _evaluator(model, gamma_bar)
    if cross_check:
        _spot_check(ev, 1.5 / (m - 1))
    return _qam_ser(ev, m)


def ber_psk(model, m, gamma_bar=None, cross_check=True):
    """Exact BER for BPSK and Gray-labelled QPSK; other orders are not modelled.

    With Gray labels the two QPSK bits see independent BPSK decisions at half
    the symbol energy, so the BER is ``(1/pi) int_0^{pi/2} M(1/(2 sin^2 t)) dt``.
    """
    if m == 2:
        return ser_mpsk(model, 2, gamma_bar, cross_check)
    if m != 4:
        raise Unsupported("closed-form BER is only available for BPSK and QPSK")
    ev = _evaluator(model, gamma_bar)
    if cross_check:
        _spot_check(ev, 0.5)
    return _qpsk_ber(ev)


def error_rates(model, const, gamma_bar=None, cross_check=True):
    """``(ber, ser)`` of a constellation; ``ber`` is NaN where no exact form exists."""
    kind, m = const.kind, const.order
    if kind == "qam":
        ser = ser_mqam(model, m, gamma_bar, cross_check)
        ber = ber_psk(model, 4, gamma_bar, False) if m == 4 else math.nan
        return ber, ser
    ser = ser_mpsk(model, m, gamma_bar, cross_check)
    if m == 2:
        return ser, ser
    return (ber_psk(model, 4, gamma_bar, False) if m == 4 else math.nan), ser


def error_rates_from_mgf(fn, const):
    """``(ber, ser)`` from an arbitrary vectorised m.g.f. callable ``fn(s)``."""
    kind, m = const.kind, const.order
    ser = _qam_ser(fn, m) if kind == "qam" else _psk_ser(fn, m)
    if m == 2:
        ber = ser
    elif m == 4:
        ber = _qpsk_ber(fn)
    else:
        ber = math.nan
    return ber, ser


def bpsk_q1_closed_form(model, gamma_bar=None):
    """BPSK BER for ``q = 1`` as a finite double sum of Tricomi functions.

    ``1/2 (1 - sum_k sum_l C(2k,k) C(k,l) Gamma(p+l+1/2) sqrt(x) /
    (c^p w^(p+l+1/2) 4^k Gamma(p)) U(p+l+1/2, p+l-k+1, 1/(c w)))`` with
    ``x = a^2 alpha gamma_bar / Z2``, ``w = 1 + x``, ``c = Z2/Z1``.
    """
    if model.q != 1:
        raise Unsupported("the closed form needs min(Nr, Ni) = 1")
    if gamma_bar is not None:
        model = model.with_gamma_bar(gamma_bar)
    p, c = model.p, model.c
    x = float(model.d(1.0))
    if x == 0.0:
        return 0.5
    w = 1.0 + x
    z = 1.0 / (c * w)
    total = 0.0
    for k in range(model.n_j):
        for l in range(k + 1):
            beta = p + l + 0.5
            log_pref = (
                math.lgamma(beta)
                + 0.5 * math.log(x)
                - p * math.log(c)
                - beta * math.log(w)
                - k * math.log(4.0)
                - math.lgamma(p)
            )
            total += math.comb(2 * k, k) * math.comb(k, l) * math.exp(log_pref) * tricomi_u(beta, p + l - k + 1, z)
    return 0.5 * (1.0 - total)


def bpsk_q1_inner_integral(model, lam):
    """``(1/pi) int_0^{pi/2} (1 + x / sin^2 t)^(-Nj) dt`` conditioned on the eigenvalue ``lam``.

    ``x = a^2 alpha gamma_bar lam / (Z1 (1 + c lam))``; evaluated in the
    finite-sum form ``1/2 (1 - mu sum_k C(2k,k) ((1 - mu^2)/4)^k)``.
    """
    m = model
    x = m.a**2 * m.alpha_j * m.gamma_bar_j * lam / (m.z1 * (1.0 + m.c * lam))
    mu = math.sqrt(x / (1.0 + x))
    s = sum(math.comb(2 * k, k) * ((1.0 - mu * mu) / 4.0) ** k for k in range(m.n_j))
    return 0.5 * (1.0 - mu * s)


# Diversity -------------------------------------------------------------------


class Diversity(NamedTuple):
    order: int
    extrapolated: bool


def diversity_order(model):
    """``min(p, Nj)`` for ``q = 1``; ``extrapolated`` flags the ``p == Nj`` case."""
    if model.q != 1:
        raise Unsupported("the diversity result covers min(Nr, Ni) = 1 only")
    return Diversity(min(model.p, model.n_j), model.p == model.n_j)


def slope_estimate(snr_db, values, k=2):
    """``-d log10(values) / d log10(gamma_bar)`` fitted on the ``k`` highest-SNR points."""
    snr_db = np.asarray(snr_db, dtype=float)
    values = np.asarray(values, dtype=float)
    if snr_db.shape != values.shape or snr_db.size < 2 or k < 2:
        raise InsufficientData("a slope needs at least two points")
    order = np.argsort(snr_db)[-k:]
    if order.size < 2:
        raise InsufficientData("a slope needs at least two points")
    if not np.all((values[order] > 0) & np.isfinite(values[order])):
        raise InsufficientData("values must be positive")
    x = snr_db[order] / 10.0
    y = np.log10(values[order])
    return float(-np.polyfit(x, y, 1)[0])


def _u_leading(a, b, z):
    # leading small-z term of U(a, b, z) for integer b
    if b >= 2:
        return math.exp(math.lgamma(b - 1) - math.lgamma(a)) * z ** (1 - b)
    if b == 1:
        return -(math.log(z) + digamma(a) + 2.0 * EULER_GAMMA) / math.gamma(a)
    return math.exp(math.lgamma(1 - b) - math.lgamma(a - b + 1))


def mgf_asymptotic_q1(model, s):
    """Large-``s gamma_bar`` approximation of the ``q = 1`` m.g.f.

    Every Tricomi factor of the binomial sum is replaced by its small-argument
    leading term (the sum splits at ``k = p`` into power, logarithmic and
    constant cases).
    """
    if np.ndim(s):
        return np.array([_mgf_asymptotic_scalar(model, float(x)) for x in np.ravel(s)]).reshape(np.shape(s))
    return _mgf_asymptotic_scalar(model, float(s))


def _mgf_asymptotic_scalar(model, s):
    if model.q != 1:
        raise Unsupported("the asymptotic form needs min(Nr, Ni) = 1")
    p, c = model.p, model.c
    d = float(model.d(s))
    w = 1.0 + d
    z = 1.0 / (c * w)
    total = sum(math.comb(model.n_j, k) * d**k * _u_leading(p, p + 1 - k, z) for k in range(model.n_j + 1))
    return total / (c**p * w ** (p + model.n_j))

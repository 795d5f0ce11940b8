"""Quick numerical oracle checks behind ``ostbc-relay selftest``."""

import math

import numpy as np

from .analytic import MgfEvaluator, SnrModel, bpsk_q1_closed_form, db_to_linear, ser_mpsk
from .channel import ChannelRealization, complex_normal
from .decoder import DecoderInput, decode_exhaustive, decode_symbolwise
from .errors import CrossCheckFailure
from .estimation import exact_csi
from .ostbc import alamouti, constellation, encode
from .special import tricomi_u


def _check_normalisation():
    worst = 0.0
    for n_r in (1, 2, 3):
        for n_i in (1, 2, 3):
            for n_j in (1, 2, 3):
                ev = MgfEvaluator(SnrModel.build(n_i, n_r, n_j, 10.0, 1.0, 1, 1))
                worst = max(worst, abs(ev(0.0) - 1.0))
    return worst <= 1e-9, f"max |M(0) - 1| = {worst:.2e}"


def _check_routes():
    worst = 0.0
    for n_r, n_i, n_j in ((2, 2, 2), (1, 3, 2), (3, 2, 3)):
        ev = MgfEvaluator(SnrModel.build(n_i, n_r, n_j, 10.0, 0.5, 4, 4))
        for s in (0.01, 1.0, 100.0):
            worst = max(worst, ev.cross_check(s))
    return True, f"max Hankel route gap = {worst:.2e}"


def _check_tricomi():
    gap = max(abs(tricomi_u(a, a + 1, z) * z**a - 1.0) for a, z in ((0.5, 0.3), (2.0, 5.0), (3.5, 0.01)))
    return gap <= 1e-8, f"max |U(a, a+1, z) z^a - 1| = {gap:.2e}"


def _check_closed_form():
    m = SnrModel.build(2, 1, 2, 1.0, 1.0, 1, 1)
    gap = max(abs(bpsk_q1_closed_form(m, g) - ser_mpsk(m, 2, g)) for g in db_to_linear([0.0, 20.0]))
    return gap <= 1e-8, f"closed form vs quadrature gap = {gap:.2e}"


def _check_decoders():
    rng = np.random.default_rng(7)
    code, const = alamouti(), constellation("qpsk")
    n = 2000
    h1, h2 = complex_normal(rng, (n, 2, 2)), complex_normal(rng, (n, 2, 2))
    ch = ChannelRealization(h1, h2)
    idx = rng.integers(0, 4, size=(n, 2, 2))
    c1, c2 = encode(code, const.points[idx[:, 0]]), encode(code, const.points[idx[:, 1]])
    y = h1 @ (h1.swapaxes(1, 2) @ c1 + h2.swapaxes(1, 2) @ c2) + 0.7 * complex_normal(rng, (n, 2, 2))
    inp = DecoderInput(y, exact_csi(ch, 1), c1, 1.0, 1.0)
    agree = float(np.mean(np.all(decode_exhaustive(inp, const, code) == decode_symbolwise(inp, const, code), axis=1)))
    return agree >= 0.999, f"symbol-wise/exhaustive agreement = {agree:.4f}"


CHECKS = (
    ("m.g.f. normalisation", _check_normalisation),
    ("Hankel entry routes", _check_routes),
    ("Tricomi U identity", _check_tricomi),
    ("BPSK closed form", _check_closed_form),
    ("decoder equivalence", _check_decoders),
)


def run_selftest(out):
    failed = 0
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except CrossCheckFailure as exc:
            ok, detail = False, str(exc)
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}", file=out)
    return 0 if failed == 0 else 2

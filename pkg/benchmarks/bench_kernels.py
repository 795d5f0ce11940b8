"""Compare the compiled and numpy kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--trials 2048] [--repeat 5]

Reports the best-of-``repeat`` wall time per call and the speed-up, after
checking both backends return the same results on the benchmark inputs.
"""

import argparse
import time

import numpy as np

from ostbc_relay.decoder import candidate_codewords
from ostbc_relay.kernels import available_backends
from ostbc_relay.ostbc import alamouti, constellation


def _cn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=2048)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the numpy backend is available")
    rng = np.random.default_rng(0)
    code = alamouti()
    b = args.trials
    y, x = _cn(rng, b, 2, 2), _cn(rng, b, 2, 2)
    h_i, h_j = _cn(rng, b, 2, 2), _cn(rng, b, 2, 2)
    cases = {}
    for name in ("bpsk", "qpsk", "16qam"):
        _, cands = candidate_codewords(code, constellation(name), 1.0)
        cases[f"ml_search[{name}, K={len(cands)}]"] = lambda k, c=cands: k.ml_search(y, x, c)
    cases["symbol_stats"] = lambda k: k.symbol_stats(y, x, code.disp_a, code.disp_b)
    cases["snr_trace"] = lambda k: k.snr_trace(h_i, h_j, 1.5, 3.0)

    print(f"{'kernel':<28}" + "".join(f"{n:>12}" for n in backends) + f"{'speed-up':>10}")
    for label, call in cases.items():
        outs = {n: call(k) for n, k in backends.items()}
        if len(outs) == 2:
            a, c = outs["python"], outs["cython"]
            a, c = (a if isinstance(a, tuple) else (a,)), (c if isinstance(c, tuple) else (c,))
            for u, v in zip(a, c):
                if not np.allclose(u, v, rtol=1e-10, atol=1e-12):
                    raise SystemExit(f"{label}: backends disagree")
        t = {n: _best(lambda k=k: call(k), args.repeat) for n, k in backends.items()}
        row = f"{label:<28}" + "".join(f"{t[n] * 1e3:>10.2f}ms" for n in backends)
        if len(t) == 2:
            row += f"{t['python'] / t['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()

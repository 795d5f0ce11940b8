"""Backend selection for the hot kernels.

The compiled Cython module is used when it imports; otherwise the numpy
implementations are used.  Set ``OSTBC_RELAY_KERNELS=python`` to force the
fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
ml_search = _pykernels.ml_search
symbol_stats = _pykernels.symbol_stats
snr_trace = _pykernels.snr_trace

if os.environ.get("OSTBC_RELAY_KERNELS", "").lower() != "python":
    try:
        from . import _ckernels
    except ImportError:
        _ckernels = None
    else:
        BACKEND = "cython"
        ml_search = _ckernels.ml_search
        symbol_stats = _ckernels.symbol_stats
        snr_trace = _ckernels.snr_trace


def available_backends():
    """Map of backend name to kernel module, for tests and benchmarks."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels as ck
    except ImportError:
        return found
    found["cython"] = ck
    return found

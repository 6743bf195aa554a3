"""Backend selection: compiled extension when available, numpy fallback otherwise.

Set ``QCHARLAB_PURE=1`` in the environment to force the pure backend (used by
the benchmark and the parity tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

_force_pure = os.environ.get("QCHARLAB_PURE", "").lower() in ("1", "true", "yes")

if not _force_pure:
    try:
        from . import _speedups as _impl
    except ImportError:  # source checkout without a built extension
        _impl = _kernels_py
else:
    _impl = _kernels_py

BACKEND = _impl.BACKEND

kronecker = _impl.kronecker
kronecker_array = _impl.kronecker_array
chi_range = _impl.chi_range
scan_chunk = _impl.scan_chunk
gcd_chunk = _impl.gcd_chunk


def backends():
    """(name, module) pairs for every importable backend."""
    out = [("pure", _kernels_py)]
    try:
        from . import _speedups
        out.append(("compiled", _speedups))
    except ImportError:
        pass
    return out

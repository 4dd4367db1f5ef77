"""Kernel backend selection.

The compiled core is used when importable; otherwise the pure-numpy backend
takes over transparently. Force a choice with LEVYWALK_KERNELS=c or
LEVYWALK_KERNELS=python (the former raises if the extension is missing).
Both backends implement the same uniform-consumption protocol and agree to
floating-point roundoff; a fixed backend is bitwise deterministic.
"""

from __future__ import annotations

import os

from . import pure
from .transforms import (  # noqa: F401  (re-exported for callers)
    DIR_ATOMS,
    DIR_SPHERE,
    LAW_EXPONENTIAL,
    LAW_PARETO,
    LAW_STABLE,
)

_requested = os.environ.get("LEVYWALK_KERNELS", "auto").strip().lower()

if _requested in ("auto", "", "c"):
    try:
        from . import _core as _impl

        BACKEND = "c"
    except ImportError:
        if _requested == "c":
            raise
        _impl = pure
        BACKEND = "python"
elif _requested == "python":
    _impl = pure
    BACKEND = "python"
else:
    raise ValueError(
        f"LEVYWALK_KERNELS={_requested!r} not understood; use 'auto', 'c' or 'python'"
    )

walk_marginals = _impl.walk_marginals
walk_steps = _impl.walk_steps
series_raw = _impl.series_raw

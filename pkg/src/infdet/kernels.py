"""Float kernel dispatch.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy implementations in ``_pykernels`` serve. Setting ``INFDET_PURE_PYTHON=1``
forces the fallback. ``BACKEND`` names the active choice.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("INFDET_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "compiled" if _impl is not _pykernels else "python"

eval_packed = _impl.eval_packed
chart_distance = _impl.chart_distance


def backend_module(name: str):
    """The kernel module for ``"compiled"`` or ``"python"``; raises if unavailable."""
    if name == "python":
        return _pykernels
    if name == "compiled":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")

"""Kernel backend selection.

The compiled extension is used when importable; otherwise the numpy
fallback takes over. Set ``MOORANK_KERNELS=fallback`` or ``=native`` to
force a backend (``native`` raises if the extension is not built).
Both backends produce identical output for identical input.
"""

from __future__ import annotations

import os

from moorank.kernels import fallback as _fallback

_requested = os.environ.get("MOORANK_KERNELS", "auto").strip().lower()
if _requested not in ("auto", "native", "fallback"):
    raise ValueError(f"unrecognized MOORANK_KERNELS value: {_requested!r}")

_impl = None
if _requested in ("auto", "native"):
    try:
        from moorank.kernels import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "native":
            raise
        _impl = None
if _impl is None:
    _impl = _fallback

BACKEND: str = "fallback" if _impl is _fallback else "native"

non_dominated_sort = _impl.non_dominated_sort
crowding_distance = _impl.crowding_distance
hypervolume_2d = _impl.hypervolume_2d


def active_backend() -> str:
    """Name of the backend selected at import time."""
    return BACKEND

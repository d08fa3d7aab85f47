"""Backend selection for the bitmask kernels.

The compiled extension is used when it was built and every mask fits in 64
bits; otherwise calls go to the pure-Python versions. Set ``FRUGALITY_PURE=1``
to force the fallback.
"""
import os

from . import _kernels_py

try:
    if os.environ.get("FRUGALITY_PURE"):
        raise ImportError
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

_WORD = 64


def _fits(masks):
    return all(m >> _WORD == 0 for m in masks)


def vertex_cover_masks(n, edge_masks, minimal_only=False, cap=10**6):
    edge_masks = list(edge_masks)
    if _compiled is not None and n < _WORD:
        return _compiled.vertex_cover_masks(n, edge_masks, minimal_only, cap)
    return _kernels_py.vertex_cover_masks(n, edge_masks, minimal_only, cap)


def minimal_masks(masks):
    masks = list(masks)
    if _compiled is not None and _fits(masks):
        return _compiled.minimal_masks(masks)
    return _kernels_py.minimal_masks(masks)


def dominance_keep(masks):
    masks = list(masks)
    if _compiled is not None and _fits(masks):
        return _compiled.dominance_keep(masks)
    return _kernels_py.dominance_keep(masks)

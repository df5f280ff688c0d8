"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the pure-Python
twin is loaded. Set ``OPTYPES_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from array import array
from collections.abc import Iterable

from . import _kernels_py

if os.environ.get("OPTYPES_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def pack(triples: Iterable[tuple[int, int, int]]) -> array:
    """Flatten ``(kind, stride, offset)`` triples into the kernel encoding."""
    return array("q", [v for t in triples for v in t])


def eval_chain(chain, x: int) -> int:
    return _impl.eval_chain(chain, x)


def eval_range(chain, lo: int, hi: int) -> list[int]:
    return _impl.eval_range(chain, lo, hi)


def first_valid(chain, lo: int) -> int:
    return _impl.first_valid(chain, lo)


def sweep_mismatch(left, right, lo: int, hi: int) -> int:
    return _impl.sweep_mismatch(left, right, lo, hi)


__all__ = ["BACKEND", "pack", "eval_chain", "eval_range", "first_valid", "sweep_mismatch"]

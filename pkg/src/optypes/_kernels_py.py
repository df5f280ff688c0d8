"""Pure-Python twin of the compiled sweep kernels.

Same flat ``(kind, stride, offset)`` chain encoding as ``_kernels.pyx``.
"""

from __future__ import annotations

from collections.abc import Sequence


def _stage_min(kind: int, s: int, off: int) -> int:
    if kind == 0:
        return max(1, -off)
    if off >= 0:
        return 1
    return 1 + (-off + s - 1) // s


def _apply(chain: Sequence[int], x: int) -> int:
    for i in range(0, len(chain), 3):
        if chain[i] == 0:
            x = (x + chain[i + 2]) // chain[i + 1] + 1
        else:
            x = (x - 1) * chain[i + 1] + chain[i + 2] + 1
    return x


def _valid(chain: Sequence[int], x: int) -> bool:
    for i in range(0, len(chain), 3):
        kind, s, off = chain[i], chain[i + 1], chain[i + 2]
        if x < _stage_min(kind, s, off):
            return False
        x = (x + off) // s + 1 if kind == 0 else (x - 1) * s + off + 1
    return True


def eval_chain(chain: Sequence[int], x: int) -> int:
    return _apply(chain, x)


def eval_range(chain: Sequence[int], lo: int, hi: int) -> list[int]:
    return [_apply(chain, x) for x in range(lo, hi + 1)]


def first_valid(chain: Sequence[int], lo: int) -> int:
    if _valid(chain, lo):
        return lo
    step, bad = 1, lo - 1
    while not _valid(chain, lo + step):
        bad = lo + step
        step *= 2
        if step > 1 << 40:
            return -1
    good = lo + step
    while good - bad > 1:
        mid = bad + (good - bad) // 2
        if _valid(chain, mid):
            good = mid
        else:
            bad = mid
    return good


def sweep_mismatch(left: Sequence[int], right: Sequence[int], lo: int, hi: int) -> int:
    for x in range(lo, hi + 1):
        if _apply(left, x) != _apply(right, x):
            return x
    return -1

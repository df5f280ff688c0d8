"""Independent reference checks.

Nothing here imports the package's algebra: outputs are computed straight
from the convolution size formula with Python integers.
"""

from __future__ import annotations

import itertools

ORACLE_HI = 512


def conv_out(i: int, k: int, p: int, d: int, s: int) -> int | None:
    """Output extent of a convolution, or None if the input is too small."""
    num = i + 2 * p - d * (k - 1) - 1
    if num < 0:
        return None
    return num // s + 1


def conv_t_out(i: int, k: int, p: int, d: int, s: int) -> int | None:
    out = (i - 1) * s - 2 * p + d * (k - 1) + 1
    return out if out >= 1 else None


def same_conv_function(a: tuple, b: tuple, lo: int = 1, hi: int = ORACLE_HI) -> bool:
    """Pointwise equality of two ``(k, p, d, s)`` convs, domains included."""
    return all(conv_out(i, *a) == conv_out(i, *b) for i in range(lo, hi + 1))


def brute_force_grid(seed: tuple, ranges: dict, hi: int = ORACLE_HI) -> list[tuple[int, int, int]]:
    """Every valid ``(k, p, d)`` type-equivalent to ``seed`` with the two
    bounded fields in their ranges and the free one searched widely.

    ``ranges`` maps two of ``"k", "p", "d"`` to inclusive ``(lo, hi)``.
    """
    k0, p0, d0, s0 = seed
    wide = {"k": range(1, 65), "p": range(0, 257), "d": range(1, 65)}
    axes = {f: (range(ranges[f][0], ranges[f][1] + 1) if f in ranges else wide[f]) for f in "kpd"}
    ref = [conv_out(i, k0, p0, d0, s0) for i in range(1, hi + 1)]
    found = []
    for k, p, d in itertools.product(axes["k"], axes["p"], axes["d"]):
        for i, want in zip(range(1, hi + 1), ref):
            if conv_out(i, k, p, d, s0) != want:
                break
        else:
            found.append((k, p, d))
    return found

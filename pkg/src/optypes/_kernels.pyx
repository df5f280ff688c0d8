# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sweep kernels over flattened per-axis chains.

A chain is a flat sequence of ``(kind, stride, offset)`` triples, applied
left to right. ``kind`` 0 is floor-affine ``floor((x + offset) / stride) + 1``;
kind 1 is reverse-affine ``(x - 1) * stride + offset + 1``.
"""

cdef long long _floordiv(long long a, long long b) nogil:
    cdef long long q = a // b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef long long _stage_min(long long kind, long long s, long long off) nogil:
    if kind == 0:
        return -off if -off > 1 else 1
    if off >= 0:
        return 1
    return 1 + _floordiv(-off + s - 1, s)


cdef long long _apply(const long long[:] chain, Py_ssize_t n, long long x) nogil:
    cdef Py_ssize_t i
    for i in range(0, n, 3):
        if chain[i] == 0:
            x = _floordiv(x + chain[i + 2], chain[i + 1]) + 1
        else:
            x = (x - 1) * chain[i + 1] + chain[i + 2] + 1
    return x


cdef bint _valid(const long long[:] chain, Py_ssize_t n, long long x) nogil:
    cdef Py_ssize_t i
    for i in range(0, n, 3):
        if x < _stage_min(chain[i], chain[i + 1], chain[i + 2]):
            return 0
        if chain[i] == 0:
            x = _floordiv(x + chain[i + 2], chain[i + 1]) + 1
        else:
            x = (x - 1) * chain[i + 1] + chain[i + 2] + 1
    return 1


def eval_chain(const long long[:] chain, long long x):
    return _apply(chain, chain.shape[0], x)


def eval_range(const long long[:] chain, long long lo, long long hi):
    cdef long long x
    cdef Py_ssize_t n = chain.shape[0]
    return [_apply(chain, n, x) for x in range(lo, hi + 1)]


def first_valid(const long long[:] chain, long long lo):
    """Smallest ``x >= lo`` at which every stage receives an in-domain input."""
    cdef Py_ssize_t n = chain.shape[0]
    cdef long long step = 1, bad = lo - 1, good, mid
    if _valid(chain, n, lo):
        return lo
    while not _valid(chain, n, lo + step):
        bad = lo + step
        step *= 2
        if step > (1LL << 40):
            return -1
    good = lo + step
    while good - bad > 1:
        mid = bad + (good - bad) // 2
        if _valid(chain, n, mid):
            good = mid
        else:
            bad = mid
    return good


def sweep_mismatch(const long long[:] left, const long long[:] right,
                   long long lo, long long hi):
    """First ``x`` in ``[lo, hi]`` where the two chains disagree, else -1."""
    cdef Py_ssize_t nl = left.shape[0], nr = right.shape[0]
    cdef long long x, found = -1
    with nogil:
        for x in range(lo, hi + 1):
            if _apply(left, nl, x) != _apply(right, nr, x):
                found = x
                break
    return found

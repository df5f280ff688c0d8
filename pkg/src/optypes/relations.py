"""Equivalence and compatibility relations, type partitioning, deduplication."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .algebra import Composite, Shape, canonicalize, compare_functions, default_sweep_hi, signature
from .errors import AxisMismatch, InputBelowMinimum
from .ops import Operation
from .space import SearchSpace


@dataclass(frozen=True)
class ShapeDomain:
    """Per-axis integer interval ``[lo, hi]``; ``hi=None`` is unbounded."""

    lo: tuple[int, ...]
    hi: tuple[Optional[int], ...] = ()

    def __post_init__(self) -> None:
        lo = tuple(self.lo)
        hi = tuple(self.hi) or (None,) * len(lo)
        if not lo or len(hi) != len(lo):
            raise AxisMismatch("domain bounds must cover the same axes")
        for i, (a, b) in enumerate(zip(lo, hi)):
            if a < 1:
                raise ValueError(f"axis {i}: lower bound {a} < 1")
            if b is not None and b < a:
                raise ValueError(f"axis {i}: empty interval [{a}, {b}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def uniform(cls, lo: int, hi: int | None = None, axes: int = 2) -> ShapeDomain:
        return cls((lo,) * axes, (hi,) * axes)

    @classmethod
    def point(cls, shape: Shape) -> ShapeDomain:
        return cls(shape.extents, shape.extents)

    @property
    def axes(self) -> int:
        return len(self.lo)

    def __contains__(self, shape: Shape) -> bool:
        return shape.axes == self.axes and all(
            a <= x and (b is None or x <= b) for x, a, b in zip(shape.extents, self.lo, self.hi)
        )

    def __str__(self) -> str:
        return " x ".join(f"[{a}, {'inf' if b is None else b}]" for a, b in zip(self.lo, self.hi))


def input_domain(op: Operation) -> ShapeDomain:
    """Acceptable inputs: ``[min_input, inf)`` on every axis."""
    return ShapeDomain(op.dimfn.min_input)


def image_domain(op: Operation, domain: ShapeDomain) -> ShapeDomain:
    """Tight interval hull of ``op``'s outputs over ``domain``.

    Entries are monotone, so endpoint images bound the range. Strided maps
    may skip values inside the hull; containment in an up-closed domain only
    depends on the minimum, so the hull is exact for that purpose.
    """
    f = op.dimfn
    if domain.axes != f.axes:
        raise AxisMismatch(f"{domain.axes}-axis domain for {f.axes}-axis operation")
    lo = tuple(f.axis(i, x) for i, x in enumerate(domain.lo))
    hi = tuple(None if x is None else f.entries[i](x) for i, x in enumerate(domain.hi))
    return ShapeDomain(lo, hi)


def channels_compatible(a: Operation, b: Operation) -> bool:
    out, inp = a.channels[1], b.channels[0]
    return out is None or inp is None or out == inp


def complete_equiv(a: Operation, b: Operation) -> bool:
    """All properties equal: kind, params, channels, separability, dimfn."""
    return a == b


def type_equiv(a: Operation, b: Operation, domain_hi: int | None = None) -> bool:
    if a.axes != b.axes:
        return False
    return compare_functions(a.dimfn, b.dimfn, domain_hi).equal


def instant_equiv(a: Operation, b: Operation, at: Shape) -> bool:
    return a.dimfn(at) == b.dimfn(at)


def forward_compat(a: Operation, b: Operation, domain: ShapeDomain) -> bool:
    """Every output of ``a`` over ``domain`` is an acceptable input of ``b``."""
    if a.axes != b.axes:
        raise AxisMismatch(f"{a.label} has {a.axes} axes, {b.label} has {b.axes}")
    for i, x in enumerate(domain.lo):
        if x < a.dimfn.min_input[i]:
            raise InputBelowMinimum(i, x, a.dimfn.min_input[i], where=a.label)
    image = image_domain(a, domain)
    return channels_compatible(a, b) and all(y >= m for y, m in zip(image.lo, b.dimfn.min_input))


def complete_compat(a: Operation, b: Operation, domain: ShapeDomain) -> bool:
    return forward_compat(a, b, domain) and forward_compat(b, a, domain)


@dataclass(frozen=True)
class TypeClass:
    signature: tuple
    members: tuple[Operation, ...]
    indices: tuple[int, ...]
    exact: bool = True

    @property
    def representative(self) -> Operation:
        return self.members[0]

    def __len__(self) -> int:
        return len(self.members)


def _classify(ops: Sequence[Operation], domain_hi: int | None) -> list[int]:
    """Class id per op, numbered by first-seen order."""
    hi = default_sweep_hi() if domain_hi is None else domain_hi
    by_sig: dict[tuple, int] = {}
    n_classes = 0
    opaque_reps: list[tuple[int, Operation]] = []
    out: list[int] = []
    for op in ops:
        sig = (op.axes, signature(op.dimfn))
        if sig in by_sig:
            out.append(by_sig[sig])
            continue
        cid = None
        if canonicalize(op.dimfn).opaque:
            for rep_id, rep in opaque_reps:
                if rep.axes == op.axes and compare_functions(rep.dimfn, op.dimfn, hi).equal:
                    cid = rep_id
                    break
        if cid is None:
            cid, n_classes = n_classes, n_classes + 1
            if canonicalize(op.dimfn).opaque:
                opaque_reps.append((cid, op))
        by_sig[sig] = cid
        out.append(cid)
    return out


def partition_types(space: SearchSpace | Sequence[Operation], domain_hi: int | None = None) -> list[TypeClass]:
    ops = list(space.ops if isinstance(space, SearchSpace) else space)
    ids = _classify(ops, domain_hi)
    groups: dict[int, list[int]] = {}
    for idx, cid in enumerate(ids):
        groups.setdefault(cid, []).append(idx)
    classes = []
    for cid in sorted(groups, key=lambda c: groups[c][0]):
        idx = groups[cid]
        first = ops[idx[0]]
        exact = not any(isinstance(e, Composite) for e in canonicalize(first.dimfn).entries)
        classes.append(TypeClass(signature(first.dimfn), tuple(ops[i] for i in idx), tuple(idx), exact))
    return classes


def dedup(space: SearchSpace, level: str = "complete", domain_hi: int | None = None) -> SearchSpace:
    """Keep the first member of each equivalence class, in input order."""
    if level == "complete":
        seen: set[Operation] = set()
        keep = []
        for i, op in enumerate(space.ops):
            if op not in seen:
                seen.add(op)
                keep.append(i)
    elif level == "type":
        keep = [c.indices[0] for c in partition_types(space, domain_hi)]
        keep.sort()
    else:
        raise ValueError(f"unknown dedup level {level!r}; expected 'complete' or 'type'")
    return space.select(keep)

"""Shapes and per-axis dimension functions.

Each axis of a :class:`DimensionFunction` carries one entry:

* :class:`FloorAffine` ``x -> floor((x + offset) / stride) + 1``, the closed
  form of convolution and pooling arithmetic, with
  ``offset = 2p - d(k - 1) - 1``;
* :class:`ReverseAffine` ``x -> (x - 1) * stride + offset + 1``, transposed
  convolution, with ``offset = d(k - 1) - 2p``;
* :class:`Composite`, an ordered chain of the two above that could not be
  fused into a single closed form.

Closed-form entries decide equality exactly. Composite entries fall back to
a pointwise sweep, and the verdict says so.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Union

from . import kernels
from .errors import AxisMismatch, InputBelowMinimum

DEFAULT_SWEEP_HI = 4096
SWEEP_ENV = "OPTYPES_SWEEP_HI"


def default_sweep_hi() -> int:
    """Upper bound for pointwise sweeps; ``$OPTYPES_SWEEP_HI`` overrides 4096."""
    raw = os.environ.get(SWEEP_ENV)
    return int(raw) if raw else DEFAULT_SWEEP_HI


@dataclass(frozen=True)
class Shape:
    extents: tuple[int, ...]

    def __post_init__(self) -> None:
        ext = tuple(self.extents)
        if not ext:
            raise ValueError("a shape needs at least one axis")
        for i, e in enumerate(ext):
            if isinstance(e, bool) or not isinstance(e, int) or e < 1:
                raise ValueError(f"axis {i}: extent must be a positive integer, got {e!r}")
        object.__setattr__(self, "extents", ext)

    @classmethod
    def of(cls, *extents: int) -> Shape:
        return cls(tuple(extents))

    @property
    def axes(self) -> int:
        return len(self.extents)

    def __len__(self) -> int:
        return len(self.extents)

    def __iter__(self):
        return iter(self.extents)

    def __getitem__(self, i: int) -> int:
        return self.extents[i]

    def __str__(self) -> str:
        return "(" + ", ".join(map(str, self.extents)) + ")"


@dataclass(frozen=True)
class FloorAffine:
    stride: int
    offset: int

    def __post_init__(self) -> None:
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")

    def __call__(self, x: int) -> int:
        return (x + self.offset) // self.stride + 1

    @property
    def min_input(self) -> int:
        return max(1, -self.offset)

    @property
    def triples(self) -> tuple[tuple[int, int, int], ...]:
        return ((0, self.stride, self.offset),)

    @property
    def signature(self) -> tuple:
        return ("floor", self.stride, self.offset)

    def __str__(self) -> str:
        return f"floor((I{self.offset:+d})/{self.stride})+1"


@dataclass(frozen=True)
class ReverseAffine:
    stride: int
    offset: int

    def __post_init__(self) -> None:
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")

    def __call__(self, x: int) -> int:
        return (x - 1) * self.stride + self.offset + 1

    @property
    def min_input(self) -> int:
        if self.offset >= 0:
            return 1
        return 1 + (-self.offset + self.stride - 1) // self.stride

    @property
    def triples(self) -> tuple[tuple[int, int, int], ...]:
        return ((1, self.stride, self.offset),)

    @property
    def signature(self) -> tuple:
        return ("reverse", self.stride, self.offset)

    def __str__(self) -> str:
        return f"(I-1)*{self.stride}{self.offset + 1:+d}"


@dataclass(frozen=True)
class Composite:
    chain: tuple[Union[FloorAffine, ReverseAffine], ...]

    def __post_init__(self) -> None:
        flat: list[FloorAffine | ReverseAffine] = []
        for e in self.chain:
            flat.extend(e.chain if isinstance(e, Composite) else (e,))
        if not flat:
            raise ValueError("empty composite chain")
        object.__setattr__(self, "chain", tuple(flat))

    @cached_property
    def packed(self):
        return kernels.pack(self.triples)

    def __call__(self, x: int) -> int:
        return kernels.eval_chain(self.packed, x)

    @cached_property
    def min_input(self) -> int:
        return kernels.first_valid(self.packed, 1)

    @property
    def triples(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(t for e in self.chain for t in e.triples)

    @property
    def signature(self) -> tuple:
        return ("opaque", self.triples)

    def __str__(self) -> str:
        return " ; ".join(str(e) for e in self.chain)


Entry = Union[FloorAffine, ReverseAffine, Composite]

IDENTITY_ENTRY = FloorAffine(1, -1)


def _packed(entry: Entry):
    if isinstance(entry, Composite):
        return entry.packed
    return kernels.pack(entry.triples)


@dataclass(frozen=True)
class DimensionFunction:
    """Per-axis dimension function with an explicit per-axis input minimum.

    ``min_input`` defaults to what the entries themselves admit. Composition
    and fusion may carry a stricter minimum than the fused entry's own.
    """

    entries: tuple[Entry, ...]
    min_input: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        if not entries:
            raise ValueError("a dimension function needs at least one axis")
        object.__setattr__(self, "entries", entries)
        if not self.min_input:
            object.__setattr__(self, "min_input", tuple(e.min_input for e in entries))
        elif len(self.min_input) != len(entries):
            raise AxisMismatch("min_input length differs from axis count")
        else:
            object.__setattr__(self, "min_input", tuple(self.min_input))

    @classmethod
    def identity(cls, axes: int) -> DimensionFunction:
        return cls((IDENTITY_ENTRY,) * axes)

    @property
    def axes(self) -> int:
        return len(self.entries)

    @property
    def opaque(self) -> bool:
        return any(isinstance(e, Composite) for e in self.entries)

    def __call__(self, shape: Shape) -> Shape:
        return evaluate(self, shape)

    def axis(self, i: int, x: int) -> int:
        """Evaluate a single axis, enforcing its minimum."""
        if x < self.min_input[i]:
            raise InputBelowMinimum(i, x, self.min_input[i])
        return self.entries[i](x)

    def __str__(self) -> str:
        return "[" + ", ".join(str(e) for e in self.entries) + "]"


def evaluate(f: DimensionFunction, shape: Shape) -> Shape:
    if shape.axes != f.axes:
        raise AxisMismatch(f"shape has {shape.axes} axes, function has {f.axes}")
    return Shape(tuple(f.axis(i, x) for i, x in enumerate(shape.extents)))


def _canonical_entry(entry: Entry) -> Entry:
    if isinstance(entry, ReverseAffine):
        if entry.stride == 1:
            return FloorAffine(1, entry.offset - 1)
        return entry
    if isinstance(entry, FloorAffine):
        return entry
    out: list[FloorAffine | ReverseAffine] = []
    for e in entry.chain:
        e = _canonical_entry(e)
        while out and isinstance(out[-1], FloorAffine) and out[-1].stride == 1:
            # inner x -> x + a + 1 substitutes exactly into any outer entry
            shift = out.pop().offset + 1
            if isinstance(e, FloorAffine):
                e = FloorAffine(e.stride, e.offset + shift)
            else:
                e = _canonical_entry(ReverseAffine(e.stride, e.offset + e.stride * shift))
        out.append(e)
    return out[0] if len(out) == 1 else Composite(tuple(out))


def canonicalize(f: DimensionFunction) -> DimensionFunction:
    """Fuse exactly-fusable chains; anything else stays an opaque Composite."""
    return DimensionFunction(tuple(_canonical_entry(e) for e in f.entries), f.min_input)


def _smallest(pred, lo: int) -> int:
    """Smallest ``x >= lo`` with monotone ``pred(x)`` true."""
    if pred(lo):
        return lo
    bad, step = lo, 1
    while not pred(lo + step):
        bad = lo + step
        step *= 2
        if step > 1 << 40:
            raise ValueError("no admissible input found")
    good = lo + step
    while good - bad > 1:
        mid = (good + bad) // 2
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good


def compose(f: DimensionFunction, g: DimensionFunction) -> DimensionFunction:
    """``g`` after ``f``, as a Composite per axis."""
    if f.axes != g.axes:
        raise AxisMismatch(f"cannot compose {f.axes}-axis with {g.axes}-axis function")
    entries = tuple(Composite((a, b)) for a, b in zip(f.entries, g.entries))
    mins = tuple(
        _smallest(lambda x, i=i: f.entries[i](x) >= g.min_input[i], f.min_input[i])
        for i in range(f.axes)
    )
    return DimensionFunction(entries, mins)


def compose_all(functions) -> DimensionFunction:
    functions = list(functions)
    out = functions[0]
    for g in functions[1:]:
        out = compose(out, g)
    return out


def signature(f: DimensionFunction) -> tuple:
    """Hashable canonical signature: per-axis (form, params..., min_input)."""
    c = canonicalize(f)
    return tuple(e.signature + (m,) for e, m in zip(c.entries, c.min_input))


class Verdict(NamedTuple):
    equal: bool
    exact: bool
    counterexample: tuple[int, int] | None = None  # (axis, input)

    def __bool__(self) -> bool:
        return self.equal


def _witness(a: Entry, b: Entry, lo: int, hi: int) -> int | None:
    x = kernels.sweep_mismatch(_packed(a), _packed(b), lo, hi)
    return None if x < 0 else x


def compare_functions(f: DimensionFunction, g: DimensionFunction, domain_hi: int | None = None) -> Verdict:
    """Decide ``f == g``; exact for closed-form axes, sampled otherwise.

    A differing ``min_input`` is a domain difference and always unequal.
    """
    if f.axes != g.axes:
        raise AxisMismatch(f"{f.axes}-axis vs {g.axes}-axis function")
    hi = default_sweep_hi() if domain_hi is None else domain_hi
    cf, cg = canonicalize(f), canonicalize(g)
    exact = not cf.opaque and not cg.opaque
    for i, (a, b) in enumerate(zip(cf.entries, cg.entries)):
        lo_f, lo_g = cf.min_input[i], cg.min_input[i]
        if lo_f != lo_g:
            return Verdict(False, True, (i, min(lo_f, lo_g)))
        if hi < lo_f:
            raise ValueError(f"domain_hi {hi} below minimum input {lo_f}")
        if isinstance(a, Composite) or isinstance(b, Composite):
            x = _witness(a, b, lo_f, hi)
            if x is not None:
                return Verdict(False, True, (i, x))
        elif a != b:
            # distinct canonical closed forms differ somewhere past any bound
            x = _witness(a, b, lo_f, max(hi, lo_f + 4 * (abs(a.offset) + abs(b.offset) + 8)))
            return Verdict(False, True, None if x is None else (i, x))
    return Verdict(True, exact)


def functions_equal(f: DimensionFunction, g: DimensionFunction, domain_hi: int | None = None) -> bool:
    return compare_functions(f, g, domain_hi).equal

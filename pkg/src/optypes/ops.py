"""Operation catalog: convolution, transposed convolution, pooling, identity.

Channels ride along as metadata (``None`` is a wildcard) and never enter the
dimension function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .algebra import DimensionFunction, FloorAffine, ReverseAffine
from .errors import InvalidParams


class Kind(str, Enum):
    CONV = "conv"
    CONV_T = "convT"
    MAX_POOL = "maxpool"
    AVG_POOL = "avgpool"
    IDENTITY = "identity"

    @property
    def is_pool(self) -> bool:
        return self in (Kind.MAX_POOL, Kind.AVG_POOL)


def _per_axis(value, axes: int, name: str) -> tuple[int, ...]:
    if isinstance(value, int) and not isinstance(value, bool):
        return (value,) * axes
    out = tuple(value)
    if len(out) != axes:
        raise InvalidParams(name, list(out))
    return out


@dataclass(frozen=True)
class ConvParams:
    kernel: tuple[int, ...]
    padding: tuple[int, ...]
    dilation: tuple[int, ...]
    stride: tuple[int, ...]

    def __post_init__(self) -> None:
        axes = len(self.kernel)
        if axes < 1:
            raise InvalidParams("kernel", list(self.kernel))
        for name in ("padding", "dilation", "stride"):
            if len(getattr(self, name)) != axes:
                raise InvalidParams(name, list(getattr(self, name)))
        bounds = {"kernel": 1, "padding": 0, "dilation": 1, "stride": 1}
        for name, lo in bounds.items():
            for axis, v in enumerate(getattr(self, name)):
                if isinstance(v, bool) or not isinstance(v, int) or v < lo:
                    raise InvalidParams(name, v, axis=axis)

    @classmethod
    def square(cls, k: int, p: int = 0, d: int = 1, s: int = 1, axes: int = 2) -> ConvParams:
        return cls(*(_per_axis(v, axes, n) for v, n in ((k, "kernel"), (p, "padding"), (d, "dilation"), (s, "stride"))))

    @property
    def axes(self) -> int:
        return len(self.kernel)

    @property
    def is_square(self) -> bool:
        return all(len(set(getattr(self, n))) == 1 for n in ("kernel", "padding", "dilation", "stride"))

    def axis(self, i: int) -> tuple[int, int, int, int]:
        """``(k, p, d, s)`` on axis ``i``."""
        return self.kernel[i], self.padding[i], self.dilation[i], self.stride[i]


def conv_offset(k: int, p: int, d: int) -> int:
    return 2 * p - d * (k - 1) - 1


def transposed_offset(k: int, p: int, d: int) -> int:
    return d * (k - 1) - 2 * p


@dataclass(frozen=True)
class Operation:
    kind: Kind
    params: Optional[ConvParams]
    axes: int = 2
    channels: tuple[Optional[int], Optional[int]] = (None, None)
    separable: bool = False
    label: str = field(default="", compare=False)
    dimfn: DimensionFunction = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        for c in self.channels:
            if c is not None and (isinstance(c, bool) or not isinstance(c, int) or c < 1):
                raise InvalidParams("channels", list(self.channels))
        if self.kind is Kind.IDENTITY:
            if self.params is not None:
                raise InvalidParams("params", "identity takes no parameters")
        elif self.params is None:
            raise InvalidParams("params", None)
        else:
            if self.params.axes != self.axes:
                raise InvalidParams("axes", self.axes)
            if self.kind.is_pool and any(d != 1 for d in self.params.dilation):
                raise InvalidParams("dilation", list(self.params.dilation))
        if self.separable and self.kind is not Kind.CONV:
            raise InvalidParams("separable", True)
        object.__setattr__(self, "dimfn", build_dimfn(self.kind, self.params, self.axes))
        if not self.label:
            object.__setattr__(self, "label", default_label(self))

    def with_label(self, label: str) -> Operation:
        return Operation(self.kind, self.params, self.axes, self.channels, self.separable, label)


def build_dimfn(kind: Kind, params: ConvParams | None, axes: int) -> DimensionFunction:
    if kind is Kind.IDENTITY:
        return DimensionFunction.identity(axes)
    entries = []
    for i in range(axes):
        k, p, d, s = params.axis(i)
        if kind is Kind.CONV_T:
            entries.append(ReverseAffine(s, transposed_offset(k, p, d)))
        else:
            entries.append(FloorAffine(s, conv_offset(k, p, d)))
    return DimensionFunction(tuple(entries))


def default_label(op: Operation) -> str:
    if op.kind is Kind.IDENTITY:
        return "identity"
    pr = op.params
    if pr.is_square:
        k, p, d, s = pr.axis(0)
        body = f"k={k} p={p}" + (f" d={d}" if not op.kind.is_pool else "") + f" s={s}"
    else:
        body = " ".join(
            f"{n}={','.join(map(str, getattr(pr, attr)))}"
            for n, attr in (("k", "kernel"), ("p", "padding"), ("d", "dilation"), ("s", "stride"))
            if not (op.kind.is_pool and n == "d")
        )
    name = "sepconv" if op.separable else op.kind.value
    return f"{name} {body}"


def make_conv(params: ConvParams, axes: int | None = None, channels=(None, None), separable: bool = False, label: str = "") -> Operation:
    return Operation(Kind.CONV, params, params.axes if axes is None else axes, tuple(channels), separable, label)


def make_conv_transpose(params: ConvParams, axes: int | None = None, channels=(None, None), label: str = "") -> Operation:
    return Operation(Kind.CONV_T, params, params.axes if axes is None else axes, tuple(channels), False, label)


def make_pool(kind: str, params: ConvParams, axes: int | None = None, channels=(None, None), label: str = "") -> Operation:
    pool = {"max": Kind.MAX_POOL, "avg": Kind.AVG_POOL}.get(kind) or Kind(kind)
    if not pool.is_pool:
        raise InvalidParams("kind", kind)
    return Operation(pool, params, params.axes if axes is None else axes, tuple(channels), False, label)


def make_identity(axes: int = 2, channels=(None, None)) -> Operation:
    return Operation(Kind.IDENTITY, None, axes, tuple(channels))


def conv(k: int, p: int = 0, d: int = 1, s: int = 1, axes: int = 2, **kw) -> Operation:
    """Square convolution shorthand."""
    return make_conv(ConvParams.square(k, p, d, s, axes), **kw)


def conv_t(k: int, p: int = 0, d: int = 1, s: int = 1, axes: int = 2, **kw) -> Operation:
    return make_conv_transpose(ConvParams.square(k, p, d, s, axes), **kw)


def pool(kind: str, k: int, p: int = 0, s: int = 1, axes: int = 2, **kw) -> Operation:
    return make_pool(kind, ConvParams.square(k, p, 1, s, axes), **kw)


def baseline_ops(axes: int = 2) -> list[Operation]:
    """The six-op baseline roster.

    conv 3x3 and 5x5, their depthwise-separable twins (same spatial
    arithmetic, flagged ``separable``), and 3x3 max/avg pooling, all
    padded to preserve extent.
    """
    return [
        conv(3, 1, axes=axes),
        conv(5, 2, axes=axes),
        conv(3, 1, axes=axes, separable=True),
        conv(5, 2, axes=axes, separable=True),
        pool("max", 3, 1, axes=axes),
        pool("avg", 3, 1, axes=axes),
    ]


# ---------------------------------------------------------------------------
# compact literal grammar: "conv k=3 p=2 d=2 s=1", "maxpool k=3 p=1", "identity"

_LITERAL_KINDS = {
    "conv": (Kind.CONV, False),
    "sepconv": (Kind.CONV, True),
    "convt": (Kind.CONV_T, False),
    "conv^t": (Kind.CONV_T, False),
    "maxpool": (Kind.MAX_POOL, False),
    "avgpool": (Kind.AVG_POOL, False),
    "identity": (Kind.IDENTITY, False),
}


def parse_op(text: str) -> Operation:
    """Parse a square-parameter operation literal.

    Recognised keys: ``k p d s axes cin cout``. ``p``/``d``/``s`` default to
    0/1/1 and ``axes`` to 2.
    """
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise InvalidParams("literal", text)
    head = tokens[0].lower()
    if head not in _LITERAL_KINDS:
        raise InvalidParams("kind", tokens[0])
    kind, separable = _LITERAL_KINDS[head]
    vals: dict[str, int] = {}
    for tok in tokens[1:]:
        key, eq, raw = tok.partition("=")
        if not eq or key not in ("k", "p", "d", "s", "axes", "cin", "cout"):
            raise InvalidParams("literal", tok)
        try:
            vals[key] = int(raw)
        except ValueError:
            raise InvalidParams(key, raw) from None
    axes = vals.pop("axes", 2)
    channels = (vals.pop("cin", None), vals.pop("cout", None))
    if kind is Kind.IDENTITY:
        if vals:
            raise InvalidParams("literal", text)
        return make_identity(axes, channels)
    if "k" not in vals:
        raise InvalidParams("k", None)
    params = ConvParams.square(vals["k"], vals.get("p", 0), vals.get("d", 1), vals.get("s", 1), axes)
    return Operation(kind, params, axes, channels, separable)

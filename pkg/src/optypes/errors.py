"""Exception hierarchy.

Every error carries a machine-readable payload via :meth:`OpTypesError.to_dict`,
which the CLI writes to stderr.
"""

from __future__ import annotations

from typing import Any


class OpTypesError(Exception):
    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        return {"error": type(self).__name__, "message": str(self), **self.details}


class AxisMismatch(OpTypesError, ValueError):
    pass


class InputBelowMinimum(OpTypesError, ValueError):
    def __init__(self, axis: int, extent: int, minimum: int, where: str | None = None) -> None:
        msg = f"axis {axis}: extent {extent} below minimum input {minimum}"
        if where:
            msg = f"{where}: {msg}"
        super().__init__(msg, axis=axis, extent=extent, minimum=minimum, where=where)
        self.axis = axis
        self.extent = extent
        self.minimum = minimum


class InvalidParams(OpTypesError, ValueError):
    def __init__(self, field: str, value: Any, axis: int | None = None, op_index: int | None = None) -> None:
        where = f" on axis {axis}" if axis is not None else ""
        at = f" (op #{op_index})" if op_index is not None else ""
        super().__init__(
            f"invalid {field}={value!r}{where}{at}", field=field, value=value, axis=axis, op_index=op_index
        )
        self.field = field
        self.axis = axis
        self.op_index = op_index


class InvalidGrid(OpTypesError, ValueError):
    pass


class InvalidSeed(OpTypesError, ValueError):
    pass


class UnknownPreset(OpTypesError, KeyError):
    def __str__(self) -> str:
        return self.args[0]


class CycleDetected(OpTypesError):
    pass


class ShapeMismatch(OpTypesError):
    def __init__(self, edge: tuple[str, str], expected: Any, got: Any) -> None:
        super().__init__(
            f"edge {edge[0]}->{edge[1]}: expected {expected}, got {got}",
            edge=list(edge),
            expected=_plain(expected),
            got=_plain(got),
        )
        self.edge = edge
        self.expected = expected
        self.got = got


class NoPath(OpTypesError):
    pass


class AmbiguousRegion(OpTypesError):
    pass


class NotTypeEquivalent(OpTypesError):
    def __init__(self, node: str, expected: Any, got: Any) -> None:
        super().__init__(
            f"replacement for {node} is not type-equivalent: {expected} vs {got}",
            node=node,
            expected=_plain(expected),
            got=_plain(got),
        )


class GraphError(OpTypesError):
    """Structural problem: unknown node, unreachable node, missing input domain."""


class ParseError(OpTypesError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        super().__init__(message, line=line, column=column)
        self.line = line
        self.column = column


class SchemaVersionMismatch(OpTypesError, ValueError):
    pass


def _plain(value: Any) -> Any:
    if hasattr(value, "extents"):
        return list(value.extents)
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value

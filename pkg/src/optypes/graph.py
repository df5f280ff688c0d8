"""Operation DAGs: shape propagation, subgraph dimension functions, interchange.

Joins (nodes with several predecessors) require every incoming shape to be
equal, which covers element-wise addition and channel concatenation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional, Union

from . import kernels
from .algebra import (
    DimensionFunction,
    Shape,
    _packed,
    canonicalize,
    compare_functions,
    compose,
    default_sweep_hi,
    signature,
)
from .errors import (
    AmbiguousRegion,
    CycleDetected,
    GraphError,
    InputBelowMinimum,
    NoPath,
    NotTypeEquivalent,
    OpTypesError,
    ShapeMismatch,
)
from .ops import Operation
from .relations import ShapeDomain


@dataclass(frozen=True)
class OpGraph:
    nodes: Mapping[str, Operation]
    edges: tuple[tuple[str, str], ...]
    inputs: Mapping[str, ShapeDomain]
    outputs: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()
    _order: tuple[str, ...] = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", MappingProxyType(dict(self.nodes)))
        object.__setattr__(self, "inputs", MappingProxyType(dict(self.inputs)))
        object.__setattr__(self, "edges", tuple((str(a), str(b)) for a, b in self.edges))
        for a, b in self.edges:
            for n in (a, b):
                if n not in self.nodes:
                    raise GraphError(f"edge {a}->{b} references unknown node {n!r}", node=n)
        if len(set(self.edges)) != len(self.edges):
            raise GraphError("duplicate edge")
        if not self.inputs:
            raise GraphError("graph declares no input nodes")
        for n, dom in self.inputs.items():
            if n not in self.nodes:
                raise GraphError(f"unknown input node {n!r}", node=n)
            if self.preds(n):
                raise GraphError(f"input node {n!r} has incoming edges", node=n)
            if dom.axes != self.nodes[n].axes:
                raise GraphError(f"input domain of {n!r} has {dom.axes} axes", node=n)
        for n in self.nodes:
            if n not in self.inputs and not self.preds(n):
                raise GraphError(f"node {n!r} has no predecessors and no input domain", node=n)
        object.__setattr__(self, "_order", self._toposort())
        reach = set(self.inputs)
        for n in self._order:
            if n in reach:
                reach.update(self.succs(n))
        missing = [n for n in self.nodes if n not in reach]
        if missing:
            raise GraphError(f"nodes unreachable from inputs: {missing}", nodes=missing)
        outs = tuple(self.outputs) or tuple(n for n in self.nodes if not self.succs(n))
        for n in outs:
            if n not in self.nodes:
                raise GraphError(f"unknown output node {n!r}", node=n)
        object.__setattr__(self, "outputs", outs)

    def preds(self, n: str) -> list[str]:
        return [a for a, b in self.edges if b == n]

    def succs(self, n: str) -> list[str]:
        return [b for a, b in self.edges if a == n]

    def _toposort(self) -> tuple[str, ...]:
        indeg = {n: 0 for n in self.nodes}
        for _, b in self.edges:
            indeg[b] += 1
        ready = [n for n in self.nodes if indeg[n] == 0]
        order = []
        while ready:
            n = ready.pop(0)
            order.append(n)
            for m in self.succs(n):
                indeg[m] -= 1
                if indeg[m] == 0:
                    ready.append(m)
        if len(order) != len(self.nodes):
            stuck = [n for n in self.nodes if indeg[n] > 0]
            raise CycleDetected(f"cycle among nodes {stuck}", nodes=stuck)
        return tuple(order)

    def topological_order(self) -> tuple[str, ...]:
        return self._order

    @classmethod
    def chain(cls, ops, domain: ShapeDomain | None = None, prefix: str = "n") -> OpGraph:
        """Linear graph ``n0 -> n1 -> ...``; default input domain is the first op's."""
        ops = list(ops)
        if not ops:
            raise GraphError("empty chain")
        ids = [f"{prefix}{i}" for i in range(len(ops))]
        dom = domain or ShapeDomain(ops[0].dimfn.min_input)
        return cls(dict(zip(ids, ops)), tuple(zip(ids, ids[1:])), {ids[0]: dom}, (ids[-1],))


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    shapes: Mapping[str, Union[Shape, ShapeDomain]] = field(default_factory=dict)
    error: Optional[OpTypesError] = None
    exact: bool = True

    def __bool__(self) -> bool:
        return self.ok

    def output_shapes(self, g: OpGraph) -> dict:
        return {n: self.shapes[n] for n in g.outputs if n in self.shapes}


def propagate(g: OpGraph, at: Shape | Mapping[str, Shape]) -> dict[str, Shape]:
    """Concrete output shape of every node; raises on the first violation."""
    feeds = at if isinstance(at, Mapping) else {n: at for n in g.inputs}
    out: dict[str, Shape] = {}
    for n in g.topological_order():
        op = g.nodes[n]
        if n in g.inputs:
            if n not in feeds:
                raise GraphError(f"no input shape for {n!r}", node=n)
            shape = feeds[n]
            dom = g.inputs[n]
            for i, (x, lo) in enumerate(zip(shape.extents, dom.lo)):
                if x < lo:
                    raise InputBelowMinimum(i, x, lo, where=f"input {n}")
        else:
            preds = g.preds(n)
            shape = out[preds[0]]
            for p in preds[1:]:
                if out[p] != shape:
                    raise ShapeMismatch((p, n), shape, out[p])
        try:
            out[n] = op.dimfn(shape)
        except InputBelowMinimum as e:
            src = g.preds(n)[0] if g.preds(n) else "input"
            raise InputBelowMinimum(e.axis, e.extent, e.minimum, where=f"{src}->{n}") from None
    return out


def _agree_on(f: DimensionFunction, g: DimensionFunction, dom: ShapeDomain, hi_default: int) -> tuple[bool, bool]:
    """Pointwise agreement of two path functions over a source domain.

    Returns ``(agree, exact)``.
    """
    cf, cg = canonicalize(f), canonicalize(g)
    if not cf.opaque and not cg.opaque and cf.entries == cg.entries:
        return True, True
    exact = True
    for i, (a, b) in enumerate(zip(cf.entries, cg.entries)):
        lo = dom.lo[i]
        hi = dom.hi[i]
        if hi is None:
            hi, exact = max(hi_default, lo), False
        if kernels.sweep_mismatch(_packed(a), _packed(b), lo, hi) >= 0:
            return False, True
    return True, exact


def _propagate_domains(g: OpGraph, domain_hi: int | None):
    hi_default = default_sweep_hi() if domain_hi is None else domain_hi
    paths: dict[str, tuple[str, DimensionFunction]] = {}
    images: dict[str, ShapeDomain] = {}
    exact = True
    for n in g.topological_order():
        op = g.nodes[n]
        if n in g.inputs:
            src, dom = n, g.inputs[n]
            for i, x in enumerate(dom.lo):
                if x < op.dimfn.min_input[i]:
                    raise InputBelowMinimum(i, x, op.dimfn.min_input[i], where=f"input {n}")
            fn = op.dimfn
        else:
            preds = g.preds(n)
            src, base = paths[preds[0]]
            dom = g.inputs[src]
            for p in preds[1:]:
                other_src, other = paths[p]
                if other_src != src:
                    raise ShapeMismatch((p, n), f"path from {src}", f"path from {other_src}")
                agree, ex = _agree_on(base, other, dom, hi_default)
                if not agree:
                    raise ShapeMismatch((p, n), str(canonicalize(base)), str(canonicalize(other)))
                exact = exact and ex
            for i in range(op.axes):
                y = base.entries[i](dom.lo[i])
                if y < op.dimfn.min_input[i]:
                    raise InputBelowMinimum(i, y, op.dimfn.min_input[i], where=f"{preds[0]}->{n}")
            fn = canonicalize(compose(base, op.dimfn))
        paths[n] = (src, fn)
        images[n] = ShapeDomain(
            tuple(fn.entries[i](x) for i, x in enumerate(dom.lo)),
            tuple(None if x is None else fn.entries[i](x) for i, x in enumerate(dom.hi)),
        )
    return images, exact


def validate(g: OpGraph, at: Shape | Mapping[str, Shape] | None = None, domain_hi: int | None = None) -> ValidationResult:
    """Check every edge.

    With ``at`` the check is a concrete propagation. Without it, every input
    ranges over its declared domain and joins must agree pointwise there.
    Shape and domain violations come back in the result; structural problems
    were already rejected when the graph was built.
    """
    try:
        if at is not None:
            return ValidationResult(True, propagate(g, at))
        images, exact = _propagate_domains(g, domain_hi)
        return ValidationResult(True, images, exact=exact)
    except (ShapeMismatch, InputBelowMinimum) as e:
        return ValidationResult(False, {}, e)


# ---------------------------------------------------------------------------
# subgraphs and interchange


def _region(g: OpGraph, src: str, dst: str) -> list[str]:
    fwd = {src}
    for n in g.topological_order():
        if n in fwd:
            fwd.update(g.succs(n))
    if dst not in fwd:
        raise NoPath(f"no path from {src!r} to {dst!r}", source=src, target=dst)
    back = {dst}
    for n in reversed(g.topological_order()):
        if n in back:
            back.update(g.preds(n))
    return [n for n in g.topological_order() if n in fwd and n in back]


def subgraph_dimfn(g: OpGraph, src: str, dst: str, domain_hi: int | None = None) -> DimensionFunction:
    """Compound dimension function of the region from ``src`` to ``dst``, inclusive."""
    for n in (src, dst):
        if n not in g.nodes:
            raise GraphError(f"unknown node {n!r}", node=n)
    region = _region(g, src, dst)
    members = set(region)
    fns: dict[str, DimensionFunction] = {}
    for n in region:
        op = g.nodes[n]
        if n == src:
            fns[n] = op.dimfn
            continue
        preds = g.preds(n)
        outside = [p for p in preds if p not in members]
        if outside:
            raise AmbiguousRegion(f"{n!r} takes input from outside the region: {outside}", node=n)
        base = fns[preds[0]]
        for p in preds[1:]:
            if not compare_functions(base, fns[p], domain_hi).equal:
                raise AmbiguousRegion(
                    f"parallel paths into {n!r} differ: {canonicalize(base)} vs {canonicalize(fns[p])}", node=n
                )
        fns[n] = canonicalize(compose(base, op.dimfn))
    return canonicalize(fns[dst])


def _endpoints(sub: OpGraph) -> tuple[str, str]:
    if len(sub.inputs) != 1 or len(sub.outputs) != 1:
        raise GraphError("replacement subgraph needs exactly one input and one output node")
    return next(iter(sub.inputs)), sub.outputs[0]


def interchange(
    g: OpGraph,
    node: str,
    replacement: Operation | OpGraph,
    allow_instant_at: Shape | None = None,
    domain_hi: int | None = None,
) -> OpGraph:
    """Replace ``node`` with a type-equivalent operation or subgraph.

    Returns a new graph; ``g`` is left untouched. ``allow_instant_at`` accepts
    a replacement that only agrees at that one shape, and marks the result
    with a warning.
    """
    if node not in g.nodes:
        raise GraphError(f"unknown node {node!r}", node=node)
    old = g.nodes[node]
    if isinstance(replacement, OpGraph):
        entry, exit_ = _endpoints(replacement)
        new_fn = subgraph_dimfn(replacement, entry, exit_, domain_hi)
    else:
        new_fn = replacement.dimfn
    warnings = list(g.warnings)
    if new_fn.axes != old.axes or not compare_functions(old.dimfn, new_fn, domain_hi).equal:
        if (
            allow_instant_at is not None
            and new_fn.axes == old.axes
            and old.dimfn(allow_instant_at) == new_fn(allow_instant_at)
        ):
            warnings.append(f"{node}: replacement only instant-equivalent at {allow_instant_at}")
        else:
            raise NotTypeEquivalent(node, _sig_text(old.dimfn), _sig_text(new_fn))

    if isinstance(replacement, OpGraph):
        rename = {n: f"{node}.{n}" for n in replacement.nodes}
        clash = [r for r in rename.values() if r in g.nodes]
        if clash:
            raise GraphError(f"renamed replacement nodes clash with existing ones: {clash}")
        inner = {rename[n]: op for n, op in replacement.nodes.items()}
        inner_edges = [(rename[a], rename[b]) for a, b in replacement.edges]
        head, tail = rename[entry], rename[exit_]
    else:
        inner = {node: replacement}
        inner_edges = []
        head = tail = node

    nodes: dict[str, Operation] = {}
    for n, op in g.nodes.items():
        if n == node:
            nodes.update(inner)
        else:
            nodes[n] = op
    edges = []
    for a, b in g.edges:
        if b == node:
            edges.append((a, head))
        elif a == node:
            edges.append((tail, b))
        else:
            edges.append((a, b))
    edges.extend(inner_edges)
    inputs = {(head if n == node else n): dom for n, dom in g.inputs.items()}
    outputs = tuple(tail if n == node else n for n in g.outputs)
    return OpGraph(nodes, tuple(edges), inputs, outputs, tuple(warnings))


def _sig_text(f: DimensionFunction) -> list[str]:
    out = []
    for sig in signature(f):
        form, *rest = sig
        out.append(f"{form}{tuple(rest)}")
    return out


__all__ = [
    "OpGraph",
    "ValidationResult",
    "propagate",
    "validate",
    "subgraph_dimfn",
    "interchange",
]

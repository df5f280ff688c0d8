"""Versioned JSON documents for search spaces, generation reports and graphs.

Canonical form is ``json.dumps(obj, indent=2, sort_keys=True)`` plus a
trailing newline, so ``dumps(loads(text)) == text`` for anything this module
wrote.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from .errors import InvalidParams, OpTypesError, ParseError, SchemaVersionMismatch
from .generator import Candidate, GenerationGrid, GenerationReport, ModeDiff
from .graph import OpGraph
from .ops import ConvParams, Kind, Operation
from .relations import ShapeDomain
from .space import Provenance, SearchSpace

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SPACE_SCHEMA = "optypes.space"
GRAPH_SCHEMA = "optypes.graph"


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _axis_value(values: tuple[int, ...]):
    return values[0] if len(set(values)) == 1 else list(values)


def op_to_dict(op: Operation) -> dict:
    out: dict[str, Any] = {"kind": op.kind.value, "axes": op.axes, "channels": list(op.channels), "label": op.label}
    if op.params is not None:
        pr = op.params
        out.update(k=_axis_value(pr.kernel), p=_axis_value(pr.padding), d=_axis_value(pr.dilation), s=_axis_value(pr.stride))
    if op.kind is Kind.CONV:
        out["separable"] = op.separable
    return out


def op_from_dict(data: dict, index: int | None = None, warnings: list[str] | None = None) -> Operation:
    if not isinstance(data, dict):
        raise InvalidParams("op", data, op_index=index)
    try:
        kind = Kind(data.get("kind"))
    except ValueError:
        raise InvalidParams("kind", data.get("kind"), op_index=index) from None
    axes = data.get("axes", 2)
    channels = data.get("channels", [None, None])
    if not isinstance(channels, list) or len(channels) != 2:
        raise InvalidParams("channels", channels, op_index=index)
    label = data.get("label", "")
    try:
        if kind is Kind.IDENTITY:
            return Operation(kind, None, axes, tuple(channels), False, label)
        if "k" not in data:
            raise InvalidParams("k", None)
        if "d" not in data:
            if warnings is not None:
                msg = f"op #{index}: missing dilation, defaulting to d=1"
                warnings.append(msg)
                log.warning(msg)
        fields = {}
        for key, default in (("k", None), ("p", 0), ("d", 1), ("s", 1)):
            v = data.get(key, default)
            if isinstance(v, list):
                fields[key] = tuple(v)
            elif isinstance(v, int) and not isinstance(v, bool):
                fields[key] = (v,) * axes
            else:
                raise InvalidParams(key, v)
        params = ConvParams(fields["k"], fields["p"], fields["d"], fields["s"])
        return Operation(kind, params, axes, tuple(channels), bool(data.get("separable", False)), label)
    except InvalidParams as e:
        raise InvalidParams(e.field, e.details.get("value"), axis=e.axis, op_index=index) from None


def provenance_to_dict(p: Provenance) -> dict:
    return {k: v for k, v in (("origin", p.origin), ("seed", p.seed), ("grid", p.grid), ("mode", p.mode)) if v is not None}


def provenance_from_dict(data: dict) -> Provenance:
    return Provenance(data.get("origin", "user"), data.get("seed"), data.get("grid"), data.get("mode"))


def space_to_dict(space: SearchSpace) -> dict:
    ops = []
    for op, prov in space.items():
        d = op_to_dict(op)
        d["provenance"] = provenance_to_dict(prov)
        ops.append(d)
    return {"name": space.name, "ops": ops}


def space_from_dict(data: dict, warnings: list[str] | None = None) -> SearchSpace:
    ops, prov = [], []
    raw = data.get("ops")
    if not isinstance(raw, list):
        raise ParseError("space payload needs an 'ops' list")
    for i, d in enumerate(raw):
        ops.append(op_from_dict(d, i, warnings))
        prov.append(provenance_from_dict(d.get("provenance", {})))
    return SearchSpace(data.get("name", ""), ops, prov)


def grid_to_dict(grid: GenerationGrid) -> dict:
    return {"name": grid.name, "K": _range(grid.K), "P": _range(grid.P), "D": _range(grid.D)}


def _range(r):
    return None if r is None else list(r)


def grid_from_dict(data: dict) -> GenerationGrid:
    def rng(v):
        return None if v is None else (v[0], v[1])

    return GenerationGrid(rng(data.get("K")), rng(data.get("P")), rng(data.get("D")), data.get("name"))


def report_to_dict(report: GenerationReport) -> dict:
    return {
        "seed": op_to_dict(report.seed),
        "grid": grid_to_dict(report.grid),
        "mode": report.mode,
        "accepted": [c.to_dict() for c in report.accepted],
        "rejected": [c.to_dict() for c in report.rejected],
    }


def _cand_value(v):
    if isinstance(v, str):
        return Fraction(v)
    return v


def report_from_dict(data: dict) -> GenerationReport:
    def cand(d):
        return Candidate(_cand_value(d.get("k")), _cand_value(d.get("p")), _cand_value(d.get("d")), d["derived"], d.get("reason"))

    return GenerationReport(
        op_from_dict(data["seed"]),
        grid_from_dict(data["grid"]),
        data["mode"],
        tuple(cand(d) for d in data.get("accepted", [])),
        tuple(cand(d) for d in data.get("rejected", [])),
    )


@dataclass
class SpaceDocument:
    space: SearchSpace
    report: Optional[GenerationReport] = None
    mode_diff: Optional[dict] = None
    version: int = SCHEMA_VERSION
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"schema": SPACE_SCHEMA, "version": self.version, "space": space_to_dict(self.space)}
        if self.report is not None:
            out["report"] = report_to_dict(self.report)
        if self.mode_diff is not None:
            out["mode_diff"] = self.mode_diff
        return out

    def dumps(self) -> str:
        return canonical_json(self.to_dict())


def _parse_json(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", e.lineno, e.colno) from None
    if not isinstance(data, dict):
        raise ParseError("document root must be an object", 1, 1)
    return data


def _check_header(data: dict, schema: str) -> None:
    if data.get("schema") != schema:
        raise ParseError(f"expected schema {schema!r}, got {data.get('schema')!r}")
    if data.get("version") != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"unsupported {schema} version {data.get('version')!r}; expected {SCHEMA_VERSION}",
            expected=SCHEMA_VERSION,
            got=data.get("version"),
        )


def loads_space(text: str) -> SpaceDocument:
    data = _parse_json(text)
    _check_header(data, SPACE_SCHEMA)
    warnings: list[str] = []
    space = space_from_dict(data.get("space") or {}, warnings)
    report = report_from_dict(data["report"]) if "report" in data else None
    return SpaceDocument(space, report, data.get("mode_diff"), data["version"], warnings)


def dumps_space(space: SearchSpace, report: GenerationReport | None = None, mode_diff: ModeDiff | None = None) -> str:
    return SpaceDocument(space, report, None if mode_diff is None else mode_diff.to_dict()).dumps()


def load(path: str | Path) -> SpaceDocument:
    return loads_space(Path(path).read_text(encoding="utf-8"))


def save(space: SearchSpace | SpaceDocument, path: str | Path) -> None:
    doc = space if isinstance(space, SpaceDocument) else SpaceDocument(space)
    Path(path).write_text(doc.dumps(), encoding="utf-8")


# ---------------------------------------------------------------------------
# graphs


def graph_to_dict(g: OpGraph) -> dict:
    out = {
        "nodes": [{"id": n, "op": op_to_dict(op)} for n, op in g.nodes.items()],
        "edges": [list(e) for e in g.edges],
        "inputs": [{"id": n, "lo": list(d.lo), "hi": list(d.hi)} for n, d in g.inputs.items()],
        "outputs": list(g.outputs),
    }
    if g.warnings:
        out["warnings"] = list(g.warnings)
    return out


def graph_from_dict(data: dict) -> OpGraph:
    try:
        nodes = {}
        for i, n in enumerate(data["nodes"]):
            nodes[str(n["id"])] = op_from_dict(n["op"], i)
        edges = tuple((a, b) for a, b in data.get("edges", []))
        inputs = {str(d["id"]): ShapeDomain(tuple(d["lo"]), tuple(d.get("hi") or ())) for d in data["inputs"]}
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, OpTypesError):
            raise
        raise ParseError(f"malformed graph payload: {e}") from None
    return OpGraph(nodes, edges, inputs, tuple(data.get("outputs", ())), tuple(data.get("warnings", ())))


def dumps_graph(g: OpGraph) -> str:
    return canonical_json({"schema": GRAPH_SCHEMA, "version": SCHEMA_VERSION, "graph": graph_to_dict(g)})


def loads_graph(text: str) -> OpGraph:
    data = _parse_json(text)
    _check_header(data, GRAPH_SCHEMA)
    return graph_from_dict(data.get("graph") or {})


def load_graph(path: str | Path) -> OpGraph:
    return loads_graph(Path(path).read_text(encoding="utf-8"))


def save_graph(g: OpGraph, path: str | Path) -> None:
    Path(path).write_text(dumps_graph(g), encoding="utf-8")

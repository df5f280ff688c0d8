"""Brute-force generation of type-equivalent convolutions.

Two of ``(k, p, d)`` are swept over inclusive ranges and the third is
derived. Every integral candidate is then checked against the seed with
:func:`~optypes.relations.type_equiv`, so neither derivation mode can emit
an operation of a different type.

Derivations, with seed ``(k, p, d)`` and ``c = 2p - d(k - 1)``:

========  =================================  ===================================
missing   ``paper`` mode                     ``strict`` mode
========  =================================  ===================================
k         ``(2p' - 2p - d(k-1)) / (d' + 1)`` ``(2p' - c) / d' + 1``
p         ``d'(k'-1) / 2``                   ``(c + d'(k'-1)) / 2``
d         ``2p' / (k'-1)``                   ``(2p' - c) / (k'-1)``
========  =================================  ===================================

Strict mode solves the equal-offset condition exactly; for identity-type
seeds (``c = 0``) its p and d rules coincide with paper mode.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import InvalidGrid, InvalidSeed, UnknownPreset
from .ops import ConvParams, Kind, Operation, make_conv
from .relations import dedup, type_equiv
from .space import Provenance, SearchSpace

MODES = ("paper", "strict")
FIELDS = ("k", "p", "d")

Range = Optional[tuple[int, int]]


@dataclass(frozen=True)
class GenerationGrid:
    K: Range
    P: Range
    D: Range
    name: Optional[str] = None

    def __post_init__(self) -> None:
        ranges = (self.K, self.P, self.D)
        nones = sum(r is None for r in ranges)
        if nones != 1:
            raise InvalidGrid(f"exactly one of K, P, D must be None, got {nones}", nones=nones)
        for label, r in zip("KPD", ranges):
            if r is None:
                continue
            lo, hi = r
            if lo < 1 or lo > hi:
                raise InvalidGrid(f"{label} range [{lo}, {hi}] is invalid", field=label, range=[lo, hi])
        for label in "KPD":
            r = getattr(self, label)
            if r is not None:
                object.__setattr__(self, label, (int(r[0]), int(r[1])))

    @property
    def missing(self) -> str:
        return FIELDS[(self.K, self.P, self.D).index(None)]

    def cells(self) -> Iterable[dict[str, int]]:
        """Bounded-field assignments in lexicographic (k, p, d) order."""
        bounded = [(f, r) for f, r in zip(FIELDS, (self.K, self.P, self.D)) if r is not None]
        (f1, r1), (f2, r2) = bounded
        for a, b in itertools.product(range(r1[0], r1[1] + 1), range(r2[0], r2[1] + 1)):
            yield {f1: a, f2: b}

    def describe(self) -> str:
        """``K=lo..hi P=None D=lo..hi`` text form, accepted by :func:`parse_grid`."""
        parts = []
        for label in "KPD":
            r = getattr(self, label)
            parts.append(f"{label}=None" if r is None else f"{label}={r[0]}..{r[1]}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.name or self.describe()


def _preset_table() -> dict[str, GenerationGrid]:
    table = {}
    for n in (4, 8, 12, 16):
        table[f"T1_kd{n:02d}"] = GenerationGrid((1, n), None, (1, n), f"T1_kd{n:02d}")
        table[f"T1_kp{n:02d}"] = GenerationGrid((2, n), (1, n), None, f"T1_kp{n:02d}")
        table[f"T1_pd{n:02d}"] = GenerationGrid(None, (1, n), (1, n), f"T1_pd{n:02d}")
    return table


GRID_PRESETS = _preset_table()


def preset_grid(code: str) -> GenerationGrid:
    try:
        return GRID_PRESETS[code]
    except KeyError:
        raise UnknownPreset(
            f"unknown grid preset {code!r}; expected one of {', '.join(sorted(GRID_PRESETS))}", code=code
        ) from None


_RANGE_RE = re.compile(r"^([KPDkpd])\s*=\s*(?:(None|none)|(\d+)\s*\.\.\s*(\d+))$")


def parse_grid(text: str) -> GenerationGrid:
    """Preset code, or ``K=lo..hi`` style fields; omitted fields are None."""
    text = text.strip()
    if text in GRID_PRESETS:
        return GRID_PRESETS[text]
    ranges: dict[str, Range] = {"K": None, "P": None, "D": None}
    parts = [p for p in re.split(r"[,\s]+", text) if p]
    if not parts:
        raise InvalidGrid(f"empty grid description {text!r}")
    for part in parts:
        m = _RANGE_RE.match(part)
        if not m:
            raise InvalidGrid(f"cannot parse grid field {part!r}")
        label = m.group(1).upper()
        ranges[label] = None if m.group(2) else (int(m.group(3)), int(m.group(4)))
    return GenerationGrid(ranges["K"], ranges["P"], ranges["D"])


def derive(seed: tuple[int, int, int], cell: dict[str, int], missing: str, mode: str) -> Optional[Fraction]:
    """Value of the missing field, or None where the rule divides by zero."""
    k, p, d = seed
    c = 2 * p - d * (k - 1)
    if missing == "k":
        p2, d2 = cell["p"], cell["d"]
        if mode == "paper":
            return Fraction(2 * p2 - 2 * p - d * (k - 1), d2 + 1)
        return Fraction(2 * p2 - c, d2) + 1
    if missing == "p":
        k2, d2 = cell["k"], cell["d"]
        base = 0 if mode == "paper" else c
        return Fraction(base + d2 * (k2 - 1), 2)
    k2, p2 = cell["k"], cell["p"]
    if k2 == 1:
        return None
    base = 0 if mode == "paper" else c
    return Fraction(2 * p2 - base, k2 - 1)


@dataclass(frozen=True)
class Candidate:
    k: int | Fraction | None
    p: int | Fraction | None
    d: int | Fraction | None
    derived: str
    reason: Optional[str] = None

    @property
    def triple(self) -> tuple:
        return (self.k, self.p, self.d)

    def to_dict(self) -> dict:
        out = {f: (str(v) if isinstance(v, Fraction) else v) for f, v in zip(FIELDS, self.triple)}
        out["derived"] = self.derived
        if self.reason is not None:
            out["reason"] = self.reason
        return out


@dataclass(frozen=True)
class GenerationReport:
    seed: Operation
    grid: GenerationGrid
    mode: str
    accepted: tuple[Candidate, ...] = ()
    rejected: tuple[Candidate, ...] = ()

    @property
    def settings(self) -> list[tuple[int, int, int]]:
        return [c.triple for c in self.accepted]

    def operations(self) -> list[Operation]:
        s = self.seed.params.stride[0]
        return [make_conv(ConvParams.square(k, p, d, s, self.seed.axes), channels=self.seed.channels) for k, p, d in self.settings]

    @property
    def provenance(self) -> Provenance:
        return Provenance("generated", seed=self.seed.label, grid=str(self.grid), mode=self.mode)


def _seed_triple(seed: Operation) -> tuple[int, int, int]:
    if seed.kind is not Kind.CONV:
        raise InvalidSeed(f"seed must be a convolution, got {seed.kind.value}", kind=seed.kind.value)
    if not seed.params.is_square:
        raise InvalidSeed("seed must have the same parameters on every axis")
    k, p, d, _ = seed.params.axis(0)
    return k, p, d


def _as_int(v: Fraction) -> int | None:
    return v.numerator if v.denominator == 1 else None


def generate_type_equivalent_convs(
    seed: Operation, grid: GenerationGrid, mode: str = "strict", domain_hi: int | None = None
) -> GenerationReport:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if not isinstance(grid, GenerationGrid):
        raise InvalidGrid("grid must be a GenerationGrid")
    triple = _seed_triple(seed)
    stride = seed.params.stride[0]
    missing = grid.missing
    accepted: list[Candidate] = []
    rejected: list[Candidate] = []
    seen: set[tuple[int, int, int]] = set()
    for cell in grid.cells():
        value = derive(triple, cell, missing, mode)
        vals = dict(cell)
        if value is None:
            vals[missing] = None
            rejected.append(Candidate(**vals, derived=missing, reason="undefined derivation"))
            continue
        iv = _as_int(value)
        vals[missing] = value if iv is None else iv
        if iv is None:
            rejected.append(Candidate(**vals, derived=missing, reason="non-integer derivation"))
            continue
        k2, p2, d2 = vals["k"], vals["p"], vals["d"]
        if k2 < 1 or p2 < 0 or d2 < 1:
            rejected.append(Candidate(**vals, derived=missing, reason="out-of-bounds"))
            continue
        if (k2, p2, d2) in seen:
            rejected.append(Candidate(**vals, derived=missing, reason="duplicate"))
            continue
        op = make_conv(ConvParams.square(k2, p2, d2, stride, seed.axes), channels=seed.channels)
        if not type_equiv(op, seed, domain_hi):
            rejected.append(Candidate(**vals, derived=missing, reason="failed verification"))
            continue
        seen.add((k2, p2, d2))
        accepted.append(Candidate(**vals, derived=missing))
    return GenerationReport(seed, grid, mode, tuple(accepted), tuple(rejected))


@dataclass(frozen=True)
class ModeDiff:
    """Where paper-mode and strict-mode generation part ways."""

    strict_only: tuple[tuple[int, int, int], ...] = ()
    paper_only: tuple[tuple[int, int, int], ...] = ()
    derived_differently: tuple[dict, ...] = field(default=())

    @property
    def identical(self) -> bool:
        return not (self.strict_only or self.paper_only or self.derived_differently)

    def to_dict(self) -> dict:
        return {
            "strict_only": [list(t) for t in self.strict_only],
            "paper_only": [list(t) for t in self.paper_only],
            "derived_differently": list(self.derived_differently),
        }


def compare_modes(seed: Operation, grid: GenerationGrid, domain_hi: int | None = None) -> ModeDiff:
    strict = generate_type_equivalent_convs(seed, grid, "strict", domain_hi)
    paper = generate_type_equivalent_convs(seed, grid, "paper", domain_hi)
    s_set, p_set = strict.settings, paper.settings
    triple = _seed_triple(seed)
    missing = grid.missing
    differ = []
    for cell in grid.cells():
        a = derive(triple, cell, missing, "paper")
        b = derive(triple, cell, missing, "strict")
        if a != b:
            key = {f: cell[f] for f in FIELDS if f in cell}
            differ.append({**key, "paper": None if a is None else str(a), "strict": None if b is None else str(b)})
    return ModeDiff(
        tuple(t for t in s_set if t not in p_set),
        tuple(t for t in p_set if t not in s_set),
        tuple(differ),
    )


def expand_space(
    space: SearchSpace,
    grid: GenerationGrid,
    seeds: str | Iterable[str] = "all_convs",
    mode: str = "strict",
    domain_hi: int | None = None,
) -> SearchSpace:
    """Append every accepted generated conv for the selected seeds.

    ``seeds`` is ``"all_convs"`` or a collection of operation labels.
    Complete-level dedup keeps the original ordering and drops regenerated
    copies of existing members.
    """
    if seeds == "all_convs":
        chosen = [op for op in space.ops if op.kind is Kind.CONV and op.params.is_square]
    else:
        wanted = set(seeds)
        chosen = [op for op in space.ops if op.label in wanted]
    out = space
    done: set[Operation] = set()
    for seed in chosen:
        if seed in done:
            continue
        done.add(seed)
        report = generate_type_equivalent_convs(seed, grid, mode, domain_hi)
        out = out.extend(report.operations(), report.provenance)
    return dedup(out, "complete")

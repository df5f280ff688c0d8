"""Search spaces and the preset rosters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import UnknownPreset
from .ops import Operation, baseline_ops, conv, conv_t

ORIGINS = ("baseline", "paper-preset", "generated", "user")


@dataclass(frozen=True)
class Provenance:
    origin: str = "user"
    seed: Optional[str] = None
    grid: Optional[str] = None
    mode: Optional[str] = None

    def __post_init__(self) -> None:
        if self.origin not in ORIGINS:
            raise ValueError(f"unknown provenance origin {self.origin!r}")


BASELINE = Provenance("baseline")
PRESET = Provenance("paper-preset")
USER = Provenance("user")


@dataclass(frozen=True)
class SearchSpace:
    name: str
    ops: tuple[Operation, ...] = ()
    provenance: tuple[Provenance, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))
        prov = tuple(self.provenance) or (USER,) * len(self.ops)
        if len(prov) != len(self.ops):
            raise ValueError("provenance must cover every operation")
        object.__setattr__(self, "provenance", prov)

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def items(self) -> Iterable[tuple[Operation, Provenance]]:
        return zip(self.ops, self.provenance)

    def select(self, indices: Iterable[int], name: str | None = None) -> SearchSpace:
        idx = list(indices)
        return SearchSpace(name or self.name, [self.ops[i] for i in idx], [self.provenance[i] for i in idx])

    def extend(self, ops: Iterable[Operation], provenance: Provenance | Iterable[Provenance] = USER, name: str | None = None) -> SearchSpace:
        ops = list(ops)
        prov = [provenance] * len(ops) if isinstance(provenance, Provenance) else list(provenance)
        return SearchSpace(name or self.name, self.ops + tuple(ops), self.provenance + tuple(prov))


def baseline_space(axes: int = 2) -> SearchSpace:
    ops = baseline_ops(axes)
    return SearchSpace("S0", ops, [BASELINE] * len(ops))


# dilated identity-type additions, in table order
DILATED_SET = ((3, 2, 2), (3, 3, 3), (5, 4, 2), (5, 6, 3), (5, 12, 6))

_REPEATS = {"3a": 1, "3b": 6, "3c": 20, "3d": 50}

SPACE_PRESETS = ("S0", "3a", "3b", "3c", "3d", "3E", "3F", "3G")


def _dilated(triples, transposed: bool = False) -> list[Operation]:
    make = conv_t if transposed else conv
    return [make(k, p, d) for k, p, d in triples]


def preset_space(code: str) -> SearchSpace:
    """Preset rosters: baseline plus dilated identity-type convolutions."""
    base = baseline_space()
    if code == "S0":
        return base
    if code in _REPEATS:
        added = _dilated(DILATED_SET) * _REPEATS[code]
    elif code == "3E":
        added = _dilated(DILATED_SET[:1])
    elif code == "3F":
        added = _dilated(DILATED_SET[:2])
    elif code == "3G":
        added = _dilated(DILATED_SET) + _dilated(DILATED_SET, transposed=True)
    else:
        raise UnknownPreset(f"unknown space preset {code!r}; expected one of {', '.join(SPACE_PRESETS)}", code=code)
    return base.extend(added, PRESET, name=code)

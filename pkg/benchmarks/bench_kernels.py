"""Compare the compiled and pure-Python sweep kernels.

    python3 benchmarks/bench_kernels.py [--hi 4096] [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

from optypes import _kernels_py
from optypes.kernels import pack

try:
    from optypes import _kernels as _compiled
except ImportError:
    _compiled = None

# two equal strided chains (worst case: the sweep never exits early)
LEFT = pack([(0, 2, -1), (0, 1, -1), (0, 2, -3)])
RIGHT = pack([(0, 2, -1), (0, 1, -1), (0, 1, -1), (0, 2, -3)])


def cases(mod, hi):
    return {
        "sweep_mismatch": lambda: mod.sweep_mismatch(LEFT, RIGHT, 1, hi),
        "eval_range": lambda: mod.eval_range(LEFT, 8, hi),
        "first_valid": lambda: mod.first_valid(LEFT, 1),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--hi", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=50)
    args = ap.parse_args()

    backends = {"python": _kernels_py}
    if _compiled is not None:
        backends["cython"] = _compiled
    else:
        print("compiled extension not built; timing the Python backend only")

    results: dict[str, dict[str, float]] = {}
    for name, mod in backends.items():
        for case, fn in cases(mod, args.hi).items():
            best = min(timeit.repeat(fn, number=args.number, repeat=args.repeat)) / args.number
            results.setdefault(case, {})[name] = best

    print(f"{'kernel':<16}{'python':>14}{'cython':>14}{'speedup':>10}")
    for case, row in results.items():
        py, cy = row["python"], row.get("cython")
        cy_txt = f"{cy * 1e6:11.1f} us" if cy else f"{'-':>14}"
        sp = f"{py / cy:9.1f}x" if cy else f"{'-':>10}"
        print(f"{case:<16}{py * 1e6:11.1f} us{cy_txt}{sp}")


if __name__ == "__main__":
    main()

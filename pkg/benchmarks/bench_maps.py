"""Benchmark the compiled matching-enumeration kernel against the pure twin.

Usage:
    python benchmarks/bench_maps.py [--big]

The default cases finish in seconds on either kernel; --big adds the
(j=4, m=4) case (15!! = 2,027,025 matchings) where the compiled kernel
matters.
"""

import sys
import time

from mapgenus import _mapcore_py
from mapgenus.fatgraph_oracle import KERNEL_KIND

try:
    from mapgenus import _mapcore
except ImportError:
    _mapcore = None

CASES = [(4, 2), (3, 4), (4, 3), (6, 2), (5, 2)]
BIG_CASES = [(4, 4)]


def run(kernel, j, m):
    t0 = time.perf_counter()
    out = kernel.genus_tally(j, m)
    return out, time.perf_counter() - t0


def main() -> int:
    cases = CASES + (BIG_CASES if "--big" in sys.argv[1:] else [])
    print("active kernel: %s" % KERNEL_KIND)
    print("%-10s %-14s %-14s %s" % ("case", "pure [s]", "compiled [s]", "speedup"))
    for j, m in cases:
        pure_out, pure_t = run(_mapcore_py, j, m)
        if _mapcore is not None:
            comp_out, comp_t = run(_mapcore, j, m)
            if (list(comp_out[0]), comp_out[1]) != (list(pure_out[0]), pure_out[1]):
                print("MISMATCH at (%d,%d): %s vs %s" % (j, m, comp_out, pure_out))
                return 1
            print("(%d,%d)%-5s %-14.4f %-14.4f %.1fx" % (j, m, "", pure_t, comp_t, pure_t / comp_t))
        else:
            print("(%d,%d)%-5s %-14.4f %-14s %s" % (j, m, "", pure_t, "n/a", "n/a"))
    return 0


if __name__ == "__main__":
    sys.exit(main())

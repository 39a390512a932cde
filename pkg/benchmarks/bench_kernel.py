"""Compare the compiled echelon kernel with the pure-Python fallback.

    python3 benchmarks/bench_kernel.py [--repeat N] [--seed S]

Two workloads: random sparse integer matrices fed straight to the kernels,
and an end-to-end cohomology table with ``bundlelab.exact`` pointed at each
kernel in turn.  Outputs are checked for equality before timings are shown.
"""

import argparse
import sys
import timeit

import numpy as np

from bundlelab import _kernel_py, exact
from bundlelab.graded import GradedMap
from bundlelab.poly import GradedRing, parse_form
from bundlelab.sheaf import cohomology_table, validate_presentation

try:
    from bundlelab import _kernel
except ImportError:
    _kernel = None

SHAPES = [(20, 30), (60, 80), (120, 160)]
WINDOW = (-8, 4)


def random_matrix(rng, nrows, ncols, density=0.05):
    # sparse +-1 entries, like the monomial multiplication matrices the
    # library eliminates; dense random matrices overflow int64 quickly and
    # then both columns time the same Python code
    m = rng.integers(-1, 2, size=(nrows, ncols)) * (rng.random((nrows, ncols)) < density)
    return [[int(x) for x in r] for r in m]


def sixfold_row_bundle():
    ring = GradedRing(3)
    forms = ["x0^3", "x1^2", "x2", "x3"]
    gmap = GradedMap(ring, [0], [3, 2, 1, 1], [[parse_form(f, ring)] for f in forms])
    return validate_presentation(gmap)


def time_call(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _kernel is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'workload':<28} {'python (s)':>11} {'compiled (s)':>13} {'speedup':>8}")
    for nrows, ncols in SHAPES:
        rows = random_matrix(rng, nrows, ncols)
        assert _kernel.echelon(rows, ncols, True) == _kernel_py.echelon(rows, ncols, True)
        tp = time_call(lambda: _kernel_py.echelon(rows, ncols, True), args.repeat)
        tc = time_call(lambda: _kernel.echelon(rows, ncols, True), args.repeat)
        print(f"{f'echelon {nrows}x{ncols}':<28} {tp:>11.4f} {tc:>13.4f} {tp / tc:>7.1f}x")
    p = sixfold_row_bundle()
    times = {}
    tables = {}
    for name, kern in (("python", _kernel_py), ("compiled", _kernel)):
        saved = exact._kernel
        exact._kernel = kern
        try:
            tables[name] = cohomology_table(p, WINDOW).dims
            times[name] = time_call(lambda: cohomology_table(p, WINDOW), args.repeat)
        finally:
            exact._kernel = saved
    assert tables["python"] == tables["compiled"]
    tp, tc = times["python"], times["compiled"]
    print(f"{'cohomology row3, k=-8..4':<28} {tp:>11.4f} {tc:>13.4f} {tp / tc:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())

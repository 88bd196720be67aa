"""Timing comparison of the compiled and pure numeric kernels.

Runs the two hot paths on realistic workloads: the bounded-variable
simplex loop on flat-norm programs over a triangulated square, and
batch B-spline evaluation on random point clouds. Usage:

    python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from currentlab.chains import Chain
from currentlab.kernels import BACKEND, get_backend
from currentlab.scenarios import gen_square


def _flatnorm_programs(resolution, count, seed):
    host = gen_square(resolution).complex
    D = host.incidence(2).toarray().astype(np.float64)
    m, p = D.shape
    A = np.hstack([np.eye(m), -np.eye(m), D, -D])
    vol1, vol2 = host.volumes(1), host.volumes(2)
    c = np.concatenate([vol1, vol1, vol2, vol2])
    upper = np.full(2 * m + 2 * p, np.inf)
    rng = np.random.default_rng(seed)
    programs = []
    for _ in range(count):
        theta = np.zeros(m)
        idx = rng.choice(m, size=8, replace=False)
        theta[idx] = rng.choice([-2.0, -1.0, 1.0, 2.0], size=8)
        basis0 = np.where(theta >= 0, np.arange(m), m + np.arange(m))
        programs.append((A, theta, c, upper, basis0))
    return programs


def _time_simplex(backend, programs, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for A, b, c, upper, basis0 in programs:
            x, obj, iters, status = backend.simplex_solve(
                A, b, c, upper, basis0, 10 * A.shape[1])
            assert status == 0
        best = min(best, time.perf_counter() - t0)
    return best / len(programs)


def _time_splines(backend, points, lo, h, cells, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        backend.bspline_eval(points, lo, h, cells)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = {"pure": get_backend("pure")}
    try:
        backends["compiled"] = get_backend("compiled")
    except ImportError:
        print("compiled backend not built; timing the fallback only")
    print("active backend at import time: %s" % BACKEND)

    print("\nsimplex on flat-norm programs (square host, 8-edge chains)")
    for resolution, count in ((6, 20), (10, 8)):
        programs = _flatnorm_programs(resolution, count, args.seed)
        m, n = programs[0][0].shape
        line = "  host %2dx%2d (A is %4d x %4d):" % (resolution,
                                                     resolution, m, n)
        times = {}
        for name, be in backends.items():
            times[name] = _time_simplex(be, programs, args.repeats)
            line += "  %s %8.3f ms" % (name, 1e3 * times[name])
        if len(times) == 2:
            line += "  speedup %.1fx" % (times["pure"]
                                         / times["compiled"])
        print(line)

    print("\nbatch B-spline evaluation")
    rng = np.random.default_rng(args.seed)
    for dim, cells_per_axis, points_n in ((2, 16, 20000), (3, 8, 5000)):
        lo = np.full(dim, -1.0)
        h = np.full(dim, 2.0 / cells_per_axis)
        cells = np.full(dim, cells_per_axis, dtype=np.int64)
        pts = rng.uniform(-1.1, 1.1, size=(points_n, dim))
        line = "  %dD, %d cells/axis, %d points:" % (dim, cells_per_axis,
                                                     points_n)
        times = {}
        for name, be in backends.items():
            times[name] = _time_splines(be, pts, lo, h, cells,
                                        args.repeats)
            line += "  %s %8.3f ms" % (name, 1e3 * times[name])
        if len(times) == 2:
            line += "  speedup %.1fx" % (times["pure"]
                                         / times["compiled"])
        print(line)


if __name__ == "__main__":
    main()

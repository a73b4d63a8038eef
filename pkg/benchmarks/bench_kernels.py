"""Compare the compiled and numpy kernel backends on the Monte Carlo hot loops.

    python3 benchmarks/bench_kernels.py [--paths 200000] [--N 64] [--repeat 3]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from levy_opt import _backend, log_triplet, make_model


def _law(model):
    tri = model.triplet
    lams = np.array(tri.intensities)
    cum = np.cumsum(lams) / lams.sum()
    cum[-1] = 1.0
    ys = np.array([a.x for a in log_triplet(tri).atoms])
    return tri, float(lams.sum()), cum, np.array(tri.sizes), ys


def bench(k, model, paths: int, n_periods: int, repeat: int) -> dict[str, float]:
    tri, lam, cum, xs, ys = _law(model)
    comp = math.fsum(a.lam * a.x for a in tri.atoms)
    g, j = np.empty(paths), np.empty(paths)
    outs = [np.empty(paths) for _ in range(5)]

    def best(fn):
        times = []
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
        return min(times)

    return {
        "increment_parts": best(lambda: k.increment_parts(1, 0, paths, 1.0 / n_periods, lam, cum, ys, g, j)),
        "coupled_terminals": best(lambda: k.coupled_terminals(
            1, 0, paths, n_periods, model.T, 0.4, 0.4, tri.b, tri.c, comp, lam, cum, xs, ys, *outs)),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=200_000)
    ap.add_argument("--N", type=int, default=64, dest="N")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    model = make_model(0.05, 0.01, [(-0.2, 1.0), (0.25, 1.0)], p=2.0)
    results = {"python": bench(_backend.get_kernels("python"), model, args.paths, args.N, args.repeat)}
    try:
        results["compiled"] = bench(_backend.get_kernels("compiled"), model, args.paths, args.N, args.repeat)
    except ImportError:
        print("compiled kernels not built; only the numpy fallback was timed")

    print(f"paths={args.paths} N={args.N} (best of {args.repeat})")
    print(f"{'kernel':<20}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}")
    for name, t_py in results["python"].items():
        t_c = results.get("compiled", {}).get(name)
        extra = f"{t_c:>14.4f}{t_py / t_c:>9.1f}x" if t_c else f"{'-':>14}{'-':>10}"
        print(f"{name:<20}{t_py:>12.4f}{extra}")


if __name__ == "__main__":
    main()

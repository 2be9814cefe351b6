"""Compare the numba kernels with their numpy twins.

    python benchmarks/bench_kernels.py [--n 10 20 50] [--restarts 16] [--repeat 3]

Both code paths are imported directly, so the SHADOWCAP_PURE_NUMPY flag does
not matter here. The first numba call (compilation, or loading the on-disk
cache) is excluded from the timings.
"""

import argparse
import time

import numpy as np

from shadowcap import kernels
from shadowcap.linalg import RngSeed, haar_orthogonal
from shadowcap.search import _objective_matrices


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[10, 20, 50])
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    # warm up / compile on a tiny problem
    M1, M2 = _objective_matrices("area", haar_orthogonal(4, RngSeed(0)))
    kernels.descend_many_nb(0, M1, M2, np.ones((2, 4)), 0.1, 0.5, 5, 1e-8)
    kernels.zonogon_area_nb(np.ones(4), np.ones(4))

    print(f"{'kernel':<22}{'n':>5}{'numba [ms]':>14}{'numpy [ms]':>14}{'speedup':>10}")
    for n in args.n:
        O = haar_orthogonal(2 * n, RngSeed(n))
        M1, M2 = _objective_matrices("area", O)
        rng = np.random.default_rng(n)
        a, b = rng.standard_normal((2, 2 * n))
        x = rng.standard_normal(2 * n)
        starts = rng.standard_normal((args.restarts, 2 * n))
        cases = [
            ("zonogon_area", lambda: kernels.zonogon_area_nb(a, b), lambda: kernels.zonogon_area_np(a, b), 200),
            (
                "area_subgradient",
                lambda: kernels.objective_grad_nb(0, M1, M2, x),
                lambda: kernels.objective_grad_np(0, M1, M2, x),
                200,
            ),
            (
                f"descent x{args.restarts}",
                lambda: kernels.descend_many_nb(0, M1, M2, starts, 0.1, 0.5, args.iters, 1e-8),
                lambda: kernels.descend_many_np(0, M1, M2, starts, 0.1, 0.5, args.iters, 1e-8),
                1,
            ),
        ]
        for name, f_nb, f_np, inner in cases:
            t_nb = best_of(lambda: [f_nb() for _ in range(inner)], args.repeat) / inner
            t_np = best_of(lambda: [f_np() for _ in range(inner)], args.repeat) / inner
            print(f"{name:<22}{n:>5}{1e3 * t_nb:>14.4f}{1e3 * t_np:>14.4f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()

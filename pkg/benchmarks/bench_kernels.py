"""Time the numba and numpy versions of each kernel on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--n 100000]

The first numba call (compilation, or loading the on-disk cache) is timed
separately and excluded from the per-call figures.
"""
import argparse
import math
import time

import numpy as np

from epihorizon import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=100_000, help="batch size for chsh_batch and lhv")
    ap.add_argument("--grid", type=int, default=2000, help="angles per axis for the grid scan")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    psis = rng.normal(size=(args.n, 4)) + 1j * rng.normal(size=(args.n, 4))
    psis /= np.linalg.norm(psis, axis=1, keepdims=True)
    thetas = rng.uniform(0, 2 * math.pi, size=(args.n, 4))
    weights = rng.integers(0, 1000, size=(args.n, 16))
    singlet = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
    grid = np.arange(args.grid) * (2 * math.pi / args.grid)

    cases = {
        "chsh_batch": (kernels.chsh_batch_numba, kernels.chsh_batch_numpy, (psis, thetas)),
        "chsh_grid_max": (kernels.chsh_grid_max_numba, kernels.chsh_grid_max_numpy,
                          (singlet, 0.0, math.pi / 2, grid)),
        "lhv_numerators": (kernels.lhv_numerators_numba, kernels.lhv_numerators_numpy, (weights,)),
    }

    print(f"numba available: {kernels.numba is not None}; default backend: {kernels.BACKEND}")
    print(f"{'kernel':<16}{'first numba':>13}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for name, (nb, np_fn, call_args) in cases.items():
        t0 = time.perf_counter()
        a = nb(*call_args)
        first = time.perf_counter() - t0
        b = np_fn(*call_args)
        if name == "chsh_grid_max":
            assert abs(a[0] - b[0]) < 1e-12
        else:
            assert np.allclose(a, b, atol=1e-12, rtol=0)
        t_nb = best_of(lambda: nb(*call_args), args.repeat)
        t_np = best_of(lambda: np_fn(*call_args), args.repeat)
        print(f"{name:<16}{first:>12.3f}s{t_nb * 1e3:>10.2f}ms{t_np * 1e3:>10.2f}ms{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()

"""
Kernel benchmark: numba vs numpy
================================

Times every hot kernel in ``mpaacs.kernels`` through both implementations on
growing problem sizes and checks that the two paths agree. The numba kernels
are called once before timing so JIT compilation is excluded.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.
"""
import argparse
import time

import numpy as np

from mpaacs import kernels


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    rng = np.random.default_rng(0)
    for n in (101, 201, 401):
        xs = np.linspace(-6, 6, n)
        for m in (2, 8):
            yield (f"wigner_grid n={n}x{n} m={m}",
                   lambda xs=xs, m=m: kernels.wigner_grid_numpy(xs, xs, 2.0, 0.0, m, 0.03),
                   lambda xs=xs, m=m: kernels.wigner_grid_numba(xs, xs, 2.0, 0.0, m, 0.03))
    for n in (10_000, 1_000_000):
        x = rng.uniform(-30, 30, n)
        yield (f"laguerre n={n} m=10",
               lambda x=x: kernels.laguerre_numpy(10, x),
               lambda x=x: kernels.laguerre_numba(10, x))
    for dim, npts in ((100, 1681), (200, 1681)):
        amps = rng.normal(size=(dim, npts)) + 1j * rng.normal(size=(dim, npts))
        yield (f"parity_weight dim={dim} pts={npts}",
               lambda a=amps: kernels.parity_weight_numpy(a),
               lambda a=amps: kernels.parity_weight_numba(a))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if kernels.numba is None:
        raise SystemExit("numba is not importable; nothing to compare")

    print(f"{'kernel':<36} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8} {'max diff':>10}")
    print("-" * 80)
    for name, f_np, f_nb in cases():
        ref, got = f_np(), f_nb()  # also warms up the JIT
        diff = float(np.max(np.abs(ref - got)))
        t_np, t_nb = best_of(f_np, args.repeat), best_of(f_nb, args.repeat)
        print(f"{name:<36} {1e3 * t_np:11.3f} {1e3 * t_nb:11.3f} {t_np / t_nb:8.1f} {diff:10.1e}")


if __name__ == "__main__":
    main()

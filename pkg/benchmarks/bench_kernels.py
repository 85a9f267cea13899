"""Compare the compiled and pure-numpy bulk kernels.

Runs the first-return statistics loop on both backends for a few problem
sizes and prints the wall times plus the speedup. The two backends are
bit-for-bit interchangeable, so this is purely a throughput measurement.

Usage: python3 benchmarks/bench_kernels.py [--repeat 3] [--seed 1]
"""

import argparse
import time

from shrinkbeta import kernels
from shrinkbeta.algebra import solve_beta

CASES = [
    (3, 1024, 1000),
    (5, 1024, 1000),
    (10, 4096, 500),
]


def _time_backend(backend, ctx, x0, steps, seed, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        kernels.induced_stats(ctx, x0, steps, seed, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def run(repeat: int, seed: int) -> None:
    backends = ["python"]
    if kernels.BACKEND == "compiled":
        backends.insert(0, "compiled")
    else:
        print("compiled extension not built; timing the fallback only")
    header = f"{'n':>4} {'points':>8} {'steps':>7}"
    for backend in backends:
        header += f" {backend + ' [s]':>14}"
    if len(backends) == 2:
        header += f" {'speedup':>9}"
    print(header)
    for n, points, steps in CASES:
        ctx = solve_beta(n)
        x0 = kernels.uniform_starts(seed, points, ctx.a + 1e-9,
                                    ctx.b - 1e-9)
        row = f"{n:>4} {points:>8} {steps:>7}"
        times = {}
        for backend in backends:
            times[backend] = _time_backend(backend, ctx, x0, steps, seed,
                                           repeat)
            row += f" {times[backend]:>14.4f}"
        if len(backends) == 2:
            row += f" {times['python'] / times['compiled']:>8.1f}x"
        print(row)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3,
                        help="keep the best of this many runs")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()
    run(args.repeat, args.seed)


if __name__ == "__main__":
    main()

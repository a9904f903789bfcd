"""Benchmark the hot kernels on both backends.

Runs each kernel through its jitted variant and its pure-numpy fallback,
checks that the outputs agree bit for bit, and reports best-of-N timings.
The dispatching wrappers pick the same two paths at call time via the
OBSBOX_NO_NUMBA environment flag; this script calls the variants directly
so one process can time both.

Usage: python3 benchmarks/bench_kernels.py [--count N] [--repeats R]
"""

import argparse
import time

import numpy as np

from obsbox import doubleslit, kernels


def _best_of(repeats, fn, *args):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--count", type=int, default=2_000_000,
                        help="elements per kernel call")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed runs per backend (best is reported)")
    args = parser.parse_args(argv)

    count = args.count
    xs, cdf = doubleslit.cdf_table(doubleslit.SlitConfig())
    draws = kernels.unit_uniforms_np(7, 0, count)

    cases = [
        ("splitmix64_block", kernels.splitmix64_block_np, (11, 0, count)),
        ("unit_uniforms", kernels.unit_uniforms_np, (11, 0, count)),
        ("uniform_indices", kernels.uniform_indices_np, (11, 100, count)),
        ("sample_icdf", kernels.sample_icdf_np, (xs, cdf, draws)),
    ]

    if not kernels.numba_available():
        print("numba unavailable; timing the numpy fallback only")
        for name, np_fn, call_args in cases:
            best, _ = _best_of(args.repeats, np_fn, *call_args)
            print(f"{name:18s} numpy {best * 1e3:8.2f} ms")
        return 0

    jitted = {
        "splitmix64_block": kernels.splitmix64_block_nb,
        "unit_uniforms": kernels.unit_uniforms_nb,
        "uniform_indices": kernels.uniform_indices_nb,
        "sample_icdf": kernels.sample_icdf_nb,
    }

    print(f"count={count}, repeats={args.repeats} (best shown)")
    print(f"{'kernel':18s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, np_fn, call_args in cases:
        nb_fn = jitted[name]
        nb_fn(*call_args)  # compile outside the timed region
        np_best, np_out = _best_of(args.repeats, np_fn, *call_args)
        nb_best, nb_out = _best_of(args.repeats, nb_fn, *call_args)
        if not np.array_equal(np_out, nb_out):
            raise SystemExit(f"{name}: backends disagree")
        print(
            f"{name:18s} {np_best * 1e3:8.2f} ms {nb_best * 1e3:8.2f} ms "
            f"{np_best / nb_best:7.2f}x"
        )
    print("all backends agree bit for bit")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--sizes 200,500,1000,2000] [--repeats 5]

Also times a short end-to-end genetic run per backend, since the sort
dominates the generation loop at realistic population sizes.
"""

import argparse
import time

import numpy as np


def best_of(repeats, fn, *args):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - started)
    return best


def bench_kernels(backends, sizes, repeats):
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'size':>7}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for size in sizes:
        objectives = rng.random((size, 2))
        violations = np.where(rng.random(size) < 0.3, rng.random(size), 0.0)
        front = objectives[backends["fallback"].non_dominated_sort(objectives, None)[0]]
        cases = [
            ("non_dominated_sort", (objectives, None)),
            ("nds constrained", (objectives, violations)),
            ("crowding_distance", (front,)),
            ("hypervolume_2d", (objectives, 2.0, 2.0)),
        ]
        for label, args in cases:
            fn_name = "non_dominated_sort" if label.startswith("nds") else label
            times = {
                name: best_of(repeats, getattr(impl, fn_name), *args)
                for name, impl in backends.items()
            }
            ratio = times["fallback"] / times["native"] if "native" in times else float("nan")
            row = f"{label:<22}{size:>7}"
            row += "".join(f"{times[name] * 1e3:>12.2f}ms" for name in backends)
            row += f"{ratio:>9.1f}x"
            print(row)
        print()


def bench_end_to_end(repeats):
    import os
    import subprocess
    import sys

    code = (
        "import time, numpy as np\n"
        "from moorank.algorithms import RunParams, run_do_nsga2\n"
        "from moorank.operators import OperatorParams\n"
        "from moorank.problems import zdt1_problem, static_schedule\n"
        "from moorank import kernels\n"
        "schedule = static_schedule(zdt1_problem(10), 60)\n"
        "params = RunParams(population_size=500, generations=60,\n"
        "                   operators=OperatorParams(p_m=0.1), seed=0)\n"
        "t0 = time.perf_counter()\n"
        "run_do_nsga2(schedule, params)\n"
        "print(f'{kernels.active_backend()}: {time.perf_counter() - t0:.2f}s')\n"
    )
    print("end-to-end genetic run (K=500, 60 generations, ZDT1 n=10):")
    for backend in ("native", "fallback"):
        env = dict(os.environ, MOORANK_KERNELS=backend)
        try:
            out = subprocess.run(
                [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
            )
            print(" ", out.stdout.strip())
        except subprocess.CalledProcessError as exc:
            print(f"  {backend}: unavailable ({exc.stderr.strip().splitlines()[-1]})")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="200,500,1000,2000")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    from moorank.kernels import fallback

    backends = {"fallback": fallback}
    try:
        from moorank.kernels import _native

        backends["native"] = _native
    except ImportError:
        print("compiled extension not built; benchmarking fallback only\n")

    sizes = [int(s) for s in args.sizes.split(",")]
    bench_kernels(backends, sizes, args.repeats)
    bench_end_to_end(args.repeats)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs each hot kernel on synthetic workloads sized like a small district
and a full neighborhood, plus the end-to-end simulate pipeline on the
bundled scenario. The active backend comes from FAIRPLAN_NUMBA; both
paths are imported explicitly here so one process can time both.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from fairplan import _kernels


def timeit(fn, *args, repeats=5, copy_args=()):
    best = float("inf")
    for _ in range(repeats):
        local = [np.array(a, copy=True) if i in copy_args else a for i, a in enumerate(args)]
        t0 = time.perf_counter()
        fn(*local)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(repeats):
    numba_set = _kernels._build_numba_kernels() if _kernels._numba_enabled() else None
    numpy_set = _kernels.numpy_kernels()
    rng = np.random.default_rng(0)

    sizes = {
        "small (40 bld, 600 res)": dict(n_bld=40, n_res=600),
        "large (400 bld, 6000 res)": dict(n_bld=400, n_res=6000),
    }
    rows = []
    for label, s in sizes.items():
        n_bld, n_res = s["n_bld"], s["n_res"]
        xy = rng.uniform(0, 3000, (n_bld, 2))
        dist = numpy_set["pairwise_distances"](xy, xy)
        kappas = np.full(5, 0.001)
        r = rng.uniform(0.1, 0.9, n_res)
        c = rng.uniform(0.1, 0.9, n_bld // 2)
        c *= r.sum() / c.sum()
        seed = rng.uniform(0.5, 1.5, (n_res, n_bld // 2))
        probs = rng.random((n_res, n_bld // 2))
        caps = np.full(n_bld // 2, max(2, n_res // n_bld), dtype=np.int64)
        order = rng.permutation(n_res).astype(np.int64)
        draws = rng.random(n_res)

        cases = [
            ("pairwise_distances", (xy, xy), ()),
            ("decay_weights", (dist, kappas, 1500.0), ()),
            ("ipf_fit", (seed, r, c, 1e-8, 10_000), (0,)),
            ("assign_sequential", (probs, caps, order, draws), (1,)),
        ]
        for name, args, copies in cases:
            t_np = timeit(numpy_set[name], *args, repeats=repeats, copy_args=copies)
            if numba_set:
                numba_set[name](*[np.array(a, copy=True) if i in copies else a
                                  for i, a in enumerate(args)])  # compile outside timing
                t_nb = timeit(numba_set[name], *args, repeats=repeats, copy_args=copies)
            else:
                t_nb = float("nan")
            rows.append((label, name, t_np, t_nb))
    return rows


def bench_pipeline(repeats):
    from fairplan import scenario
    from fairplan.allocate import simulate
    from fairplan.recommend import SoftEvaluator, frank_wolfe, resolve_constraints

    design, population, config = scenario.load_scenario()
    simulate(design, population, config, seed=0)  # warm
    t_sim = timeit(lambda: simulate(design, population, config, seed=0), repeats=repeats)
    cons = resolve_constraints({"budget_fraction": 0.1}, design)
    t_fw = timeit(lambda: frank_wolfe(design, population, cons, config, max_iter=40),
                  repeats=max(1, repeats // 2))
    return t_sim, t_fw


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    print(f"active backend: {_kernels.BACKEND}")
    rows = bench_kernels(args.repeats)
    print(f"\n{'workload':<28}{'kernel':<22}{'numpy':>12}{'numba':>12}{'speedup':>9}")
    for label, name, t_np, t_nb in rows:
        speed = t_np / t_nb if t_nb == t_nb and t_nb > 0 else float("nan")
        print(f"{label:<28}{name:<22}{t_np * 1e3:>10.2f}ms{t_nb * 1e3:>10.2f}ms{speed:>8.1f}x")

    t_sim, t_fw = bench_pipeline(args.repeats)
    print(f"\nbundled scenario ({_kernels.BACKEND} backend):")
    print(f"  simulate (600 residents): {t_sim * 1e3:.1f} ms")
    print(f"  frank_wolfe (40 iters):   {t_fw * 1e3:.1f} ms")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three packed GF(2) kernels on representative shapes, plus two
end-to-end operations (perfectness verification of the n = 341 code and a
batch of algebraic decodes).  Run with ``python benchmarks/bench_kernels.py``;
use ``--repeat`` to change the sample count.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from swhamming import _kernels, codec, gf2, hcms, sources
from swhamming._kernels import set_backend


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def make_cases(rng: np.random.Generator):
    rref_m = gf2.random_matrix(341, 682, rng)
    mm_a = gf2.random_matrix(341, 341, rng)
    mm_b = gf2.random_matrix(341, 341, rng)
    mv_m = gf2.random_matrix(341, 341, rng)
    mv_x = gf2.random_matrix(1, 341, rng).row(0)
    bundle = hcms.hcms_for_a(5)
    members = [sources.random_member(3, 341, rng) for _ in range(200)]
    syndromes = [codec.encode(bundle.code, x) for x in members]

    def bench_rref():
        data = rref_m.data.copy()
        _kernels.rref_in_place(data, rref_m.cols)

    def bench_matmul():
        _ = mm_a @ mm_b

    def bench_matvec():
        for _ in range(100):
            gf2.mat_vec(mv_m, mv_x)

    def bench_is_perfect():
        assert codec.is_perfect(bundle.code)

    def bench_decode():
        for y in syndromes:
            hcms.hcms_decode(bundle, y)

    return [
        ("rref 341x682", bench_rref),
        ("matmul 341^2", bench_matmul),
        ("matvec 341 x100", bench_matvec),
        ("is_perfect n=341", bench_is_perfect),
        ("decode n=341 x200", bench_decode),
    ]


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = _kernels.available_backends()
    results: dict[str, dict[str, float]] = {}
    for backend in backends:
        set_backend(backend)
        _kernels.warmup()
        rng = np.random.default_rng(args.seed)
        for name, fn in make_cases(rng):
            fn()  # warm any remaining compilation / caches
            results.setdefault(name, {})[backend] = best_of(fn, args.repeat)

    width = max(len(n) for n in results)
    header = f"{'case':<{width}}  " + "  ".join(f"{b:>12}" for b in backends)
    if "numba" in backends and "numpy" in backends:
        header += f"  {'numba speedup':>14}"
    print(header)
    for name, times in results.items():
        row = f"{name:<{width}}  " + "  ".join(
            f"{times[b] * 1e3:>10.3f}ms" for b in backends
        )
        if "numba" in times and "numpy" in times and times["numba"]:
            row += f"  {times['numpy'] / times['numba']:>13.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

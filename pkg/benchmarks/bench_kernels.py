"""Numba kernels vs numpy fallbacks on representative inputs.

Run: python3 benchmarks/bench_kernels.py [--repeat N]
Both backends are checked for identical output before timing.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from flatlift import kernels
from flatlift.census import _cells, enumerate_classes


def _time(fn, args, repeat: int) -> float:
    fn(*args)  # warm-up (triggers compilation for the jit path)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def cases(rng: np.random.Generator):
    p, k = 3, 3
    q = p ** k
    A = rng.integers(0, q, size=(24, 24)) * p ** rng.integers(0, k, size=(24, 1))
    yield "snf 24x24 mod 27", kernels.snf_jit, kernels.snf_numpy, (A.astype(np.int64), p, k)
    G = (rng.integers(0, q, size=(6, 10)) * p).astype(np.int64)
    z0 = rng.integers(0, q, size=10).astype(np.int64)
    yield "lexmin 6 gens, 10 coords", kernels.lexmin_jit, kernels.lexmin_numpy, (z0, G, p, k)
    B = rng.integers(-1, 2, size=(40, 30)).astype(np.int64)
    yield "rank 40x30", kernels.rank_jit, kernels.rank_numpy, (B,)
    L = enumerate_classes(7)[7][-1].astype(np.int64)
    pos, elem = _cells(L.astype(bool))
    yield "canonical code n=7", kernels.canon_jit, kernels.canon_numpy, (L, pos, elem)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<28}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, jit, ref, inputs in cases(rng):
        if not _same(jit(*inputs), ref(*inputs)):
            raise SystemExit(f"backends disagree on {name}")
        tj = _time(jit, inputs, args.repeat)
        tn = _time(ref, inputs, args.repeat)
        print(f"{name:<28}{tj * 1e3:>12.3f}{tn * 1e3:>12.3f}{tn / tj:>10.1f}")


if __name__ == "__main__":
    main()

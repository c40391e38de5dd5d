"""Timing harness for the two hot kernels, numba vs numpy backends.

Run from the repo root:

    python3 benchmarks/bench_kernels.py [--repeats 7]

The numba path is warmed once before timing so JIT compilation never
pollutes a measurement. Numbers are best-of-N wall clock.
"""
import argparse
import os
import time

from roofsim import kernels
from roofsim.kernels import all_pairs_hop_sum, decode_time_sum
from roofsim.topology import Topology, TopologyKind, build_graph

DECODE_SIZES = (256, 4096, 65536, 1048576)
TORUS_DIMS = ((8, 8), (16, 16), (16, 16, 4))

# a plausible decode affine shape: memory bound early, compute later
DECODE_ARGS = dict(comp_a=1.1e-3, comp_b=3.2e-7, mem_a=2.4e-3,
                   mem_b=1.9e-7, net=1.5e-4)


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def with_backend(name, fn):
    old = os.environ.get("ROOFSIM_BACKEND")
    os.environ["ROOFSIM_BACKEND"] = name
    try:
        return fn()
    finally:
        if old is None:
            del os.environ["ROOFSIM_BACKEND"]
        else:
            os.environ["ROOFSIM_BACKEND"] = old


def fmt(seconds):
    return f"{seconds * 1e3:9.3f} ms"


def bench_decode(repeats):
    print("decode_time_sum  (per-token step summation)")
    print(f"{'n_steps':>10} {'numba':>12} {'numpy':>12} {'speedup':>8}")
    for n in DECODE_SIZES:
        run = lambda: decode_time_sum(512, n, **DECODE_ARGS)
        with_backend("numba", run)   # warm the JIT
        t_nb = with_backend("numba", lambda: best_of(run, repeats))
        t_np = with_backend("numpy", lambda: best_of(run, repeats))
        print(f"{n:>10} {fmt(t_nb)} {fmt(t_np)} {t_np / t_nb:7.2f}x")
    print()


def bench_hops(repeats):
    print("all_pairs_hop_sum  (BFS over CSR adjacency)")
    print(f"{'torus':>10} {'numba':>12} {'numpy':>12} {'speedup':>8}")
    for dims in TORUS_DIMS:
        n = 1
        for d in dims:
            n *= d
        topo = Topology(kind=TopologyKind.TORUS, link_bw=1e11, dims=dims)
        indptr, indices, members = build_graph(topo, n)
        run = lambda: all_pairs_hop_sum(indptr, indices, members)
        with_backend("numba", run)
        t_nb = with_backend("numba", lambda: best_of(run, repeats))
        t_np = with_backend("numpy", lambda: best_of(run, repeats))
        label = "x".join(str(d) for d in dims)
        print(f"{label:>10} {fmt(t_nb)} {fmt(t_np)} {t_np / t_nb:7.2f}x")
    print()


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeats", type=int, default=7)
    args = ap.parse_args()
    if not kernels.HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    bench_decode(args.repeats)
    bench_hops(args.repeats)


if __name__ == "__main__":
    main()

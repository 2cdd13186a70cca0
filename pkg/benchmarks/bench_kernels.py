"""Compiled versus fallback kernels on exact-cover and label-closure workloads.

Run with ``python benchmarks/bench_kernels.py [--repeat R]``.  Each workload
is run once per backend to warm up, then timed ``R`` times; the median is
reported together with a check that both backends return the same result.
"""

import argparse
import statistics
import time

import numpy as np

from ghor import kernels
from ghor.central import label_basis
from ghor.instances import build_conifold_torus, build_genus2, build_polynomial
from ghor.labels import arrow_label_table


def torus_grid_cover(rows, cols):
    """Dimer constraints of a rows x cols toroidal grid: one constraint per node, one variable per edge."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            edges.append((r * cols + c, r * cols + (c + 1) % cols))
            edges.append((r * cols + c, ((r + 1) % rows) * cols + c))
    faces = [[] for _ in range(rows * cols)]
    for i, (a, b) in enumerate(edges):
        faces[a].append(i)
        faces[b].append(i)
    return [sorted(f) for f in faces], len(edges)


def closure_args(q, bound):
    basis = label_basis(q)
    vidx = {v: i for i, v in enumerate(q.vertices)}
    tails = [vidx[a.tail] for a in q.arrows]
    heads = [vidx[a.head] for a in q.arrows]
    return 0, tails, heads, arrow_label_table(q, basis), bound


def workloads():
    out = []
    for rows, cols in [(4, 4), (4, 6), (2, 14)]:
        faces, n = torus_grid_cover(rows, cols)
        out.append((f"exact_cover torus {rows}x{cols}", lambda f=faces, n=n: kernels.exact_cover(f, n)))
    for name, q, bound in [("conifold", build_conifold_torus(), 24), ("polynomial-4", build_polynomial(4), 10),
                           ("genus2-octagon", build_genus2(), 14)]:
        args = closure_args(q, bound)
        out.append((f"label_closure {name} D={bound}", lambda a=args: kernels.label_closure(*a)))
    return out


def timed(fn, repeat):
    fn()
    samples = []
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        samples.append(time.perf_counter() - t)
    return statistics.median(samples), result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not kernels.numba_available:
        print("numba not installed; only the fallback can run")
    print(f"{'workload':40s} {'numba':>10s} {'fallback':>10s} {'speedup':>8s}  same")
    for name, fn in workloads():
        times, results = {}, {}
        for jit in ([True, False] if kernels.numba_available else [False]):
            kernels.use_numba(jit)
            times[jit], results[jit] = timed(fn, args.repeat)
        kernels.use_numba(kernels.numba_available)
        fast, slow = times.get(True, np.nan), times[False]
        same = results.get(True, results[False]) == results[False]
        size = len(results[False])
        print(f"{name:40s} {fast:10.4f} {slow:10.4f} {slow / fast:8.1f}x  {same} ({size} results)")


if __name__ == "__main__":
    main()

"""Compare the numba and numpy all-pairs kernels.

Usage: python benchmarks/bench_distances.py [max_nodes]

Times both backends on the bundled Sioux Falls network and on random
strongly connected graphs of growing size, and checks they agree entry for
entry.  Force one backend package-wide with ECOROUTES_BACKEND=numpy|numba.
"""

import sys
import time

import numpy as np

from ecoroutes import _kernels
from ecoroutes.network import bundled_sioux_falls


def dense_random_matrix(rng, n):
    dist = rng.integers(1, 100, size=(n, n)).astype(np.int64)
    mask = rng.random((n, n)) < 0.7  # drop arcs; diagonal stays zero
    dist[mask] = _kernels.INF
    np.fill_diagonal(dist, 0)
    return dist


def network_matrix(net):
    n = len(net.nodes)
    dist = np.full((n, n), _kernels.INF, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    for u, v, w in net.arcs:
        dist[net.node_index(u), net.node_index(v)] = w
    return dist


def time_backend(base, backend, repeats=5):
    best = None
    for _ in range(repeats):
        work = base.copy()
        t0 = time.perf_counter()
        out = _kernels.floyd_warshall(work, backend=backend)
        elapsed = time.perf_counter() - t0
        best = elapsed if best is None or elapsed < best else best
    return best, out


def main():
    max_nodes = int(sys.argv[1]) if len(sys.argv) > 1 else 400
    try:
        _kernels.floyd_warshall(np.zeros((2, 2), dtype=np.int64), backend="numba")
        have_numba = True
    except ImportError:
        have_numba = False
        print("numba unavailable; timing the numpy backend only")

    rng = np.random.Generator(np.random.PCG64(0))
    cases = [("sioux-falls (24)", network_matrix(bundled_sioux_falls()))]
    n = 50
    while n <= max_nodes:
        cases.append((f"random ({n})", dense_random_matrix(rng, n)))
        n *= 2

    print(f"{'case':>18}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for name, base in cases:
        t_np, out_np = time_backend(base, "numpy")
        if have_numba:
            t_nb, out_nb = time_backend(base, "numba")
            assert np.array_equal(out_np, out_nb), f"backends disagree on {name}"
            print(f"{name:>18}  {t_np * 1e3:8.2f}ms  {t_nb * 1e3:8.2f}ms  {t_np / t_nb:7.1f}x")
        else:
            print(f"{name:>18}  {t_np * 1e3:8.2f}ms  {'-':>10}  {'-':>8}")


if __name__ == "__main__":
    main()

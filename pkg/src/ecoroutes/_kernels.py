"""All-pairs shortest-distance kernels.

Two interchangeable implementations of the classical dynamic-programming
recurrence (Floyd-Warshall) over an int64 distance matrix:

* a numba ``@njit`` kernel (default when numba is importable), and
* a vectorized pure-numpy fallback.

The active backend is chosen once at import time from the environment
variable ``ECOROUTES_BACKEND``:

* ``numba``  -- require the JIT kernel (ImportError if numba is missing),
* ``numpy``  -- force the pure-numpy path,
* unset / ``auto`` -- numba if available, numpy otherwise.

Both kernels operate on exact integers and produce bit-identical results;
``benchmarks/bench_distances.py`` compares their speed.
"""

import os

import numpy as np

_ENV_VAR = "ECOROUTES_BACKEND"

# Sentinel for "no arc yet": big enough to never be a real distance, small
# enough that INF + INF stays below int64 overflow.
INF = np.int64(2**61)


def _floyd_warshall_numpy(dist):
    n = dist.shape[0]
    for k in range(n):
        np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :], out=dist)
    return dist


_numba_kernel = None


def _make_numba_kernel():
    global _numba_kernel
    if _numba_kernel is not None:
        return _numba_kernel
    from numba import njit

    @njit(cache=True)
    def _fw(dist):
        n = dist.shape[0]
        for k in range(n):
            for i in range(n):
                dik = dist[i, k]
                for j in range(n):
                    alt = dik + dist[k, j]
                    if alt < dist[i, j]:
                        dist[i, j] = alt
        return dist

    _numba_kernel = _fw
    return _fw


def _select_backend():
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be 'numba', 'numpy' or 'auto', got {choice!r}")
    if choice == "numpy":
        return "numpy", _floyd_warshall_numpy
    try:
        kernel = _make_numba_kernel()
    except ImportError:
        if choice == "numba":
            raise
        return "numpy", _floyd_warshall_numpy
    return "numba", kernel


BACKEND, _kernel = _select_backend()


def active_backend():
    """Name of the kernel backend in use: 'numba' or 'numpy'."""
    return BACKEND


def floyd_warshall(dist, backend=None):
    """Run the all-pairs recurrence in place on an int64 square matrix.

    ``dist`` holds arc lengths, ``INF`` where no arc exists and 0 on the
    diagonal.  Returns ``dist`` for convenience.
    """
    if backend is None:
        return _kernel(dist)
    if backend == "numpy":
        return _floyd_warshall_numpy(dist)
    if backend == "numba":
        return _make_numba_kernel()(dist)
    raise ValueError(f"unknown backend {backend!r}")

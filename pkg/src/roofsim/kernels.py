"""Hot numeric loops with a numba fast path and a numpy/scipy fallback.

Two loops dominate runtime: summing per-token decode step times over a
growing context (called once per scenario, thousands of times per sweep
or plan exploration), and all-pairs BFS hop counting for topologies.
``ROOFSIM_BACKEND`` selects the implementation: "numba" (default when
available) or "numpy". Both backends agree to float round-off; results
are reduced sequentially in numba and pairwise in numpy.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is an install-time choice
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

VALID_BACKENDS = ("numba", "numpy")


def backend() -> str:
    """Active backend name, from ROOFSIM_BACKEND or availability."""
    env = os.environ.get("ROOFSIM_BACKEND", "").strip().lower()
    if env:
        if env not in VALID_BACKENDS:
            raise ValueError(
                f"ROOFSIM_BACKEND must be one of {VALID_BACKENDS}, got {env!r}")
        if env == "numba" and not HAS_NUMBA:
            raise ValueError("ROOFSIM_BACKEND=numba but numba is not installed")
        return env
    return "numba" if HAS_NUMBA else "numpy"


# ---------------------------------------------------------------- decode sum

# no cache=True: numba disk caches break when the package is imported
# under a different dotted path than it was compiled under
@njit
def _decode_time_sum_numba(ctx0, n_steps, comp_a, comp_b, mem_a, mem_b, net):
    total = 0.0
    for i in range(n_steps):
        ctx = ctx0 + i
        compute = comp_a + comp_b * ctx
        memory = mem_a + mem_b * ctx
        step = compute if compute > memory else memory
        total += step + net
    return total


def _decode_time_sum_numpy(ctx0, n_steps, comp_a, comp_b, mem_a, mem_b, net):
    ctx = ctx0 + np.arange(n_steps, dtype=np.float64)
    steps = np.maximum(comp_a + comp_b * ctx, mem_a + mem_b * ctx) + net
    return float(np.sum(steps))


def decode_time_sum(ctx0: int, n_steps: int, comp_a: float, comp_b: float,
                    mem_a: float, mem_b: float, net: float) -> float:
    """Sum of per-token step times over contexts ctx0 .. ctx0+n_steps-1.

    Each step takes max(comp_a + comp_b*ctx, mem_a + mem_b*ctx) + net
    seconds; the context grows by one per generated token. Exact
    summation, not an endpoint approximation.
    """
    if n_steps <= 0:
        return 0.0
    args = (float(ctx0), int(n_steps), float(comp_a), float(comp_b),
            float(mem_a), float(mem_b), float(net))
    if backend() == "numba":
        return _decode_time_sum_numba(*args)
    return _decode_time_sum_numpy(*args)


# ------------------------------------------------------------- all-pairs BFS

@njit
def _hop_sum_numba(indptr, indices, members):
    n = indptr.shape[0] - 1
    total = np.int64(0)
    dist = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    is_member = np.zeros(n, dtype=np.uint8)
    for m in members:
        is_member[m] = 1
    for src in members:
        dist[:] = -1
        dist[src] = 0
        queue[0] = src
        head, tail = 0, 1
        while head < tail:
            u = queue[head]
            head += 1
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue[tail] = v
                    tail += 1
        for v in range(n):
            if is_member[v] and v != src:
                if dist[v] < 0:
                    return np.int64(-1)  # disconnected
                total += dist[v]
    return total


def _hop_sum_scipy(indptr, indices, members):
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    n = indptr.shape[0] - 1
    data = np.ones(indices.shape[0], dtype=np.int8)
    graph = csr_matrix((data, indices, indptr), shape=(n, n))
    dist = shortest_path(graph, method="D", unweighted=True, indices=members)
    sub = dist[:, members]
    if np.isinf(sub).any():
        return -1
    return int(sub.sum())  # diagonal contributes zeros


def all_pairs_hop_sum(indptr: np.ndarray, indices: np.ndarray,
                      members: np.ndarray) -> int:
    """Total shortest-path hops over ordered pairs of member nodes.

    The graph is CSR adjacency over all nodes (switches included);
    ``members`` are the compute endpoints averaged over. Returns -1 if
    any member pair is disconnected.
    """
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    members = np.ascontiguousarray(members, dtype=np.int64)
    if backend() == "numba":
        return int(_hop_sum_numba(indptr, indices, members))
    return int(_hop_sum_scipy(indptr, indices, members))

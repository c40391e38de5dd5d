"""Interconnect topologies, message timing, and collective models.

Topologies are undirected graphs of compute endpoints plus, for trees,
internal switch nodes. Hop counts are shortest-path edge counts averaged
over distinct ordered pairs of compute endpoints. A message costs a fixed
per-message overhead, a per-hop latency, and payload over link bandwidth.

Collectives are first-order closed forms. Software AllReduce is
ring-style: 2(n-1) steps carrying 1/n of the payload each. On a tree the
ring embedding crosses each tree link twice, so its bandwidth term is
doubled; with in-network aggregation the switches reduce and multicast
instead (one up pass, one down pass), which never loses to the ring.
MoE dispatch/collect are all-to-all scatter/gather: n-1 steps of 1/n of
the payload.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kernels import all_pairs_hop_sum

DEFAULT_MESSAGE_OVERHEAD = 1e-6   # seconds; NIC/software send cost
DEFAULT_HOP_LATENCY = 100e-9      # seconds per link traversal


class TopologyError(ValueError):
    """Topology parameters inconsistent with the node count."""


class UnsupportedCollectiveError(ValueError):
    """Collective/topology combination outside the model."""


class TopologyKind(enum.Enum):
    FULLY_CONNECTED = "fully_connected"
    TORUS = "torus"
    TREE = "tree"
    DRAGONFLY = "dragonfly"


class CollectiveKind(enum.Enum):
    ALL_REDUCE = "all_reduce"
    BROADCAST = "broadcast"
    MOE_DISPATCH = "moe_dispatch"
    MOE_COLLECT = "moe_collect"
    # pipeline boundary sends; a traffic category, not a collective
    POINT_TO_POINT = "point_to_point"


@dataclass(frozen=True)
class Topology:
    """Interconnect shape plus link timing parameters.

    ``overhead_scale`` is a what-if knob for reduced per-message software
    overhead (e.g. better NICs); 1.0 claims no benefit.
    """
    kind: TopologyKind
    link_bw: float                                 # bytes/s per link
    per_hop_latency: float = DEFAULT_HOP_LATENCY   # seconds
    per_message_overhead: float = DEFAULT_MESSAGE_OVERHEAD
    in_network_collectives: bool = False
    dims: tuple[int, ...] = ()                     # torus only
    fanout: int = 0                                # tree only
    groups: int = 0                                # dragonfly only
    per_group: int = 0                             # dragonfly; 0 = derive
    overhead_scale: float = 1.0

    def __post_init__(self):
        if self.link_bw <= 0:
            raise ValueError("link_bw must be positive")
        if self.per_hop_latency <= 0:
            raise ValueError("per_hop_latency must be positive")
        if self.per_message_overhead < 0:
            raise ValueError("per_message_overhead must be >= 0")
        if not 0.0 <= self.overhead_scale <= 1.0:
            raise ValueError("overhead_scale must be in [0, 1]")
        if self.kind is TopologyKind.TORUS:
            if not self.dims or any(k < 2 for k in self.dims):
                raise ValueError("torus needs dims with every extent >= 2")
        elif self.kind is TopologyKind.TREE:
            if self.fanout < 2:
                raise ValueError("tree fanout must be >= 2")
        elif self.kind is TopologyKind.DRAGONFLY:
            if self.groups < 1:
                raise ValueError("dragonfly needs groups >= 1")
            if self.per_group < 0:
                raise ValueError("per_group must be >= 0")

    @property
    def message_overhead(self) -> float:
        return self.per_message_overhead * self.overhead_scale


def tree_depth(fanout: int, n_leaves: int) -> int:
    """Minimum depth of a complete fanout-ary tree with >= n leaves."""
    depth = 0
    cap = 1
    while cap < n_leaves:
        cap *= fanout
        depth += 1
    return depth


def build_graph(t: Topology, n_nodes: int) -> tuple[np.ndarray, np.ndarray,
                                                    np.ndarray]:
    """CSR adjacency (indptr, indices) and compute-endpoint ids."""
    if n_nodes < 1:
        raise TopologyError("n_nodes must be >= 1")
    edges: set[tuple[int, int]] = set()

    if t.kind is TopologyKind.FULLY_CONNECTED:
        members = np.arange(n_nodes)
        for i in range(n_nodes):
            for j in range(i + 1, n_nodes):
                edges.add((i, j))

    elif t.kind is TopologyKind.TORUS:
        if math.prod(t.dims) != n_nodes:
            raise TopologyError(
                f"torus dims {t.dims} hold {math.prod(t.dims)} nodes, "
                f"plan needs {n_nodes}")
        members = np.arange(n_nodes)
        strides = []
        s = 1
        for k in t.dims:
            strides.append(s)
            s *= k
        for idx in range(n_nodes):
            coords = [(idx // st) % k for st, k in zip(strides, t.dims)]
            for d, k in enumerate(t.dims):
                if k == 1:
                    continue
                up = idx + ((coords[d] + 1) % k - coords[d]) * strides[d]
                edges.add((min(idx, up), max(idx, up)))
                if k > 2:
                    down = idx + ((coords[d] - 1) % k - coords[d]) * strides[d]
                    edges.add((min(idx, down), max(idx, down)))

    elif t.kind is TopologyKind.TREE:
        depth = tree_depth(t.fanout, n_nodes)
        level_offset = [0]
        for lvl in range(depth):
            level_offset.append(level_offset[-1] + t.fanout**lvl)
        n_internal = level_offset[-1]
        members = n_internal + np.arange(n_nodes)
        # switch levels: parent of level-l node i is level l-1 node i//fanout
        for lvl in range(1, depth):
            for i in range(t.fanout**lvl):
                child = level_offset[lvl] + i
                parent = level_offset[lvl - 1] + i // t.fanout
                edges.add((parent, child))
        for leaf in range(n_nodes):
            if depth == 0:
                break
            parent = level_offset[depth - 1] + leaf // t.fanout
            edges.add((parent, n_internal + leaf))

    elif t.kind is TopologyKind.DRAGONFLY:
        if n_nodes % t.groups != 0:
            raise TopologyError(
                f"dragonfly groups {t.groups} must divide {n_nodes} nodes")
        per = n_nodes // t.groups
        if t.per_group and t.per_group != per:
            raise TopologyError(
                f"dragonfly groups x per_group = {t.groups * t.per_group}, "
                f"plan needs {n_nodes}")
        members = np.arange(n_nodes)
        for g in range(t.groups):
            base = g * per
            for i in range(per):
                for j in range(i + 1, per):
                    edges.add((base + i, base + j))
        for a in range(t.groups):
            for b in range(a + 1, t.groups):
                u = a * per + b % per
                v = b * per + a % per
                edges.add((min(u, v), max(u, v)))
    else:  # pragma: no cover
        raise TopologyError(f"unknown topology kind {t.kind}")

    total = (int(members.max()) + 1) if len(members) else 1
    adj: list[list[int]] = [[] for _ in range(total)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    indptr = np.zeros(total + 1, dtype=np.int64)
    flat: list[int] = []
    for i, neigh in enumerate(adj):
        neigh.sort()
        flat.extend(neigh)
        indptr[i + 1] = len(flat)
    return indptr, np.asarray(flat, dtype=np.int64), members.astype(np.int64)


@lru_cache(maxsize=4096)
def _avg_hops_cached(t: Topology, n_nodes: int) -> float:
    if n_nodes == 1:
        return 0.0
    if t.kind is TopologyKind.FULLY_CONNECTED:
        return 1.0
    indptr, indices, members = build_graph(t, n_nodes)
    total = all_pairs_hop_sum(indptr, indices, members)
    if total < 0:
        raise TopologyError(f"{t.kind.value} graph is disconnected")
    return total / (n_nodes * (n_nodes - 1))


def avg_hops(t: Topology, n_nodes: int) -> float:
    """Mean shortest-path hops over distinct ordered endpoint pairs."""
    return _avg_hops_cached(t, n_nodes)


def message_time(t: Topology, payload_bytes: float, n_nodes: int,
                 system_n: int | None = None) -> float:
    """Time for one average point-to-point message.

    ``system_n`` sizes the physical topology when the communicating set is
    a subgroup of a larger machine (hops reflect the full fabric); it
    defaults to ``n_nodes``.
    """
    if payload_bytes < 0:
        raise ValueError("payload_bytes must be >= 0")
    return (t.message_overhead
            + avg_hops(t, system_n or n_nodes) * t.per_hop_latency
            + payload_bytes / t.link_bw)


def _ring_congestion(t: Topology) -> float:
    # A ring order embedded in a tree crosses each tree link twice
    # (once mid-sequence, once for the wrap-around message).
    return 2.0 if t.kind is TopologyKind.TREE else 1.0


def collective_time(t: Topology, kind: CollectiveKind, payload_bytes: float,
                    n_nodes: int, moe_skew: float = 1.0,
                    system_n: int | None = None) -> float:
    """Time for one collective over ``n_nodes`` endpoints.

    ``payload_bytes`` is the per-endpoint payload: the reduced vector for
    AllReduce/Broadcast, the scattered total for MoE dispatch/collect.
    ``moe_skew`` >= 1 inflates the all-to-all bandwidth term for hot-expert
    imbalance; 1 is the expected-balance default.  ``system_n`` sizes the
    physical fabric when the group is a slice of a larger machine: latency
    terms (hops, tree depth) come from the full machine while step counts
    and payload splits stay group-sized.
    """
    if not isinstance(kind, CollectiveKind):
        raise UnsupportedCollectiveError(f"unknown collective {kind!r}")
    if kind is CollectiveKind.POINT_TO_POINT:
        raise UnsupportedCollectiveError(
            "point-to-point traffic is timed by message_time, not as a "
            "collective")
    if payload_bytes < 0:
        raise ValueError("payload_bytes must be >= 0")
    if n_nodes < 1:
        raise ValueError("n_nodes must be >= 1")
    if moe_skew < 1:
        raise ValueError("moe_skew must be >= 1")
    if t.in_network_collectives and t.kind is not TopologyKind.TREE:
        raise UnsupportedCollectiveError(
            "in-network collectives are modeled only for tree topologies")
    if n_nodes == 1:
        return 0.0
    fabric_n = system_n or n_nodes

    hops = avg_hops(t, fabric_n)
    step_latency = t.message_overhead + hops * t.per_hop_latency
    congestion = _ring_congestion(t)

    if kind is CollectiveKind.ALL_REDUCE:
        if t.in_network_collectives:
            depth = tree_depth(t.fanout, fabric_n)
            return (2 * depth * t.per_hop_latency
                    + 2 * payload_bytes / t.link_bw)
        steps = 2 * (n_nodes - 1)
        return steps * (step_latency
                        + congestion * (payload_bytes / n_nodes) / t.link_bw)

    if kind is CollectiveKind.BROADCAST:
        if t.in_network_collectives:
            depth = tree_depth(t.fanout, fabric_n)
            return (t.message_overhead + depth * t.per_hop_latency
                    + payload_bytes / t.link_bw)
        rounds = math.ceil(math.log2(n_nodes))
        return rounds * message_time(t, payload_bytes, n_nodes, fabric_n)

    # all-to-all scatter (dispatch) or gather (collect)
    steps = n_nodes - 1
    return steps * (step_latency
                    + moe_skew * congestion * (payload_bytes / n_nodes)
                    / t.link_bw)

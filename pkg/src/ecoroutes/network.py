"""Street-network graphs and all-pairs shortest distances.

A Network is a strongly connected directed graph with non-negative integer
arc lengths.  DistanceMatrix holds exact shortest distances for every
ordered node pair plus a successor table, so one canonical shortest path
can be reconstructed per pair.
"""

import heapq
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._sioux_falls import SIOUX_FALLS_EDGE_LIST


class EdgeListError(ValueError):
    """Malformed edge-list document (carries a line number when known)."""


@dataclass(frozen=True)
class Network:
    """Directed graph: opaque integer node ids, non-negative integer arc lengths."""

    nodes: tuple
    arcs: tuple  # (from, to, length) triples
    name: str = ""
    _index: dict = field(default_factory=dict, repr=False, compare=False)
    _adj: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        node_set = set(self.nodes)
        seen = set()
        for u, v, w in self.arcs:
            if u == v:
                raise EdgeListError(f"self-loop arc at node {u}")
            if (u, v) in seen:
                raise EdgeListError(f"duplicate arc ({u}, {v})")
            seen.add((u, v))
            if w < 0:
                raise EdgeListError(f"negative length on arc ({u}, {v})")
            if u not in node_set or v not in node_set:
                missing = u if u not in node_set else v
                raise EdgeListError(f"arc endpoint {missing} is not a listed node")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.nodes)})
        adj = {n: [] for n in self.nodes}
        for u, v, w in self.arcs:
            adj[u].append((v, w))
        for lst in adj.values():
            lst.sort()
        object.__setattr__(self, "_adj", adj)
        if not self.is_strongly_connected():
            raise EdgeListError("graph is not strongly connected")

    # -- basic queries ------------------------------------------------------

    def node_index(self, node):
        return self._index[node]

    def out_arcs(self, node):
        """Sorted (neighbor, length) pairs leaving `node`."""
        return self._adj[node]

    def is_strongly_connected(self):
        if not self.nodes:
            return False
        forward = {n: [] for n in self.nodes}
        backward = {n: [] for n in self.nodes}
        for u, v, _ in self.arcs:
            forward[u].append(v)
            backward[v].append(u)

        def reaches_all(adj):
            start = self.nodes[0]
            seen = {start}
            stack = [start]
            while stack:
                for nxt in adj[stack.pop()]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            return len(seen) == len(self.nodes)

        return reaches_all(forward) and reaches_all(backward)

    def to_edge_list(self):
        """Serialize as an edge-list document (all arcs directed)."""
        lines = [f"# {self.name or 'network'}: {len(self.nodes)} nodes, {len(self.arcs)} directed arcs.",
                 "# FROM TO LENGTH directed"]
        for u, v, w in self.arcs:
            lines.append(f"{u} {v} {w} directed")
        return "\n".join(lines) + "\n"


def parse_edge_list(text, name=""):
    """Parse an edge-list document into a Network.

    One record per line: ``FROM TO LENGTH [directed|undirected]``; `#`
    comments and blank lines are ignored; edges default to undirected and
    expand to two opposite directed arcs.
    """
    arcs = []
    nodes = []
    node_seen = set()

    def add_node(n):
        if n not in node_seen:
            node_seen.add(n)
            nodes.append(n)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise EdgeListError(f"line {lineno}: expected 'FROM TO LENGTH [directed|undirected]', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(f"line {lineno}: node ids must be integers") from None
        try:
            w = int(parts[2])
        except ValueError:
            raise EdgeListError(f"line {lineno}: length must be an integer") from None
        if w < 0:
            raise EdgeListError(f"line {lineno}: negative length {w}")
        if u == v:
            raise EdgeListError(f"line {lineno}: self-loop at node {u}")
        mode = parts[3].lower() if len(parts) == 4 else "undirected"
        if mode not in ("directed", "undirected"):
            raise EdgeListError(f"line {lineno}: unknown arc mode {parts[3]!r}")
        add_node(u)
        add_node(v)
        arcs.append((u, v, w))
        if mode == "undirected":
            arcs.append((v, u, w))
    if not arcs:
        raise EdgeListError("document defines no arcs")
    nodes.sort()
    return Network(nodes=tuple(nodes), arcs=tuple(arcs), name=name)


def bundled_sioux_falls():
    """The standard Sioux Falls benchmark: 24 nodes, 76 directed arcs."""
    return parse_edge_list(SIOUX_FALLS_EDGE_LIST, name="sioux-falls")


@dataclass(frozen=True)
class DistanceMatrix:
    """Exact shortest distances and canonical successors for one Network."""

    net: Network
    dist: np.ndarray  # int64, (n, n)
    succ: np.ndarray  # int32 node-index of the next hop, -1 on the diagonal

    def distance(self, u, v):
        return int(self.dist[self.net.node_index(u), self.net.node_index(v)])

    def path(self, u, v):
        """One canonical shortest path from u to v, as a node list."""
        nodes = self.net.nodes
        i, j = self.net.node_index(u), self.net.node_index(v)
        walk = [u]
        guard = 0
        while i != j:
            i = int(self.succ[i, j])
            walk.append(nodes[i])
            guard += 1
            if guard > len(nodes) ** 2:
                raise RuntimeError("successor table is cyclic")  # pragma: no cover
        return walk


def _build_successors(net, dist):
    """Canonical next-hop table: lowest-id successor on a shortest path.

    Nodes are settled per destination in increasing (distance, id) order and
    a successor must already be settled (or be the destination), which keeps
    the walk acyclic even when zero-length arcs are present.
    """
    n = len(net.nodes)
    succ = np.full((n, n), -1, dtype=np.int32)
    idx = net.node_index
    for j, dest in enumerate(net.nodes):
        order = sorted(range(n), key=lambda i: (int(dist[i, j]), net.nodes[i]))
        settled = {j}
        for i in order:
            if i == j:
                continue
            src = net.nodes[i]
            for v, w in net.out_arcs(src):
                vi = idx(v)
                if vi in settled and w + dist[vi, j] == dist[i, j]:
                    succ[i, j] = vi
                    break
            settled.add(i)
    return succ


def all_pairs_shortest(net):
    """Shortest distances for every ordered pair, by the all-pairs recurrence."""
    n = len(net.nodes)
    dist = np.full((n, n), _kernels.INF, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    idx = net.node_index
    for u, v, w in net.arcs:
        iu, iv = idx(u), idx(v)
        if w < dist[iu, iv]:
            dist[iu, iv] = w
    _kernels.floyd_warshall(dist)
    return DistanceMatrix(net=net, dist=dist, succ=_build_successors(net, dist))


def all_pairs_dijkstra(net):
    """Independent cross-check: repeated single-source distance search.

    Returns the same (n, n) int64 matrix `all_pairs_shortest` computes, via
    a heap-based label-setting algorithm instead of the all-pairs recurrence.
    """
    n = len(net.nodes)
    idx = net.node_index
    out = np.full((n, n), _kernels.INF, dtype=np.int64)
    for src in net.nodes:
        dist = {src: 0}
        done = set()
        heap = [(0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for v, w in net.out_arcs(u):
                alt = d + w
                if v not in dist or alt < dist[v]:
                    dist[v] = alt
                    heapq.heappush(heap, (alt, v))
        i = idx(src)
        for v, d in dist.items():
            out[i, idx(v)] = d
    return out

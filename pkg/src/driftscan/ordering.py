"""Dimension reduction by componentwise-dominance sort or MST traversal.

Two labeled point clouds (reference R and moving window W) are merged,
ordered by either the dominance partial order (poset) or a minimum
spanning tree leaf-peeling traversal, and read back as two 1-D ECDFs
over traversal positions. Any 1-D CDF measure then applies unchanged.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError
from .measures import Ecdf1D

__all__ = [
    "LabeledPoint",
    "PosetDag",
    "TopoPartition",
    "SpanningTree",
    "ParallelismWarning",
    "dominance",
    "label_points",
    "build_poset",
    "topo_partition_poset",
    "build_mst",
    "topo_partition_mst",
    "ecdf_from_partition",
    "ordered_partition",
]

LESS = "less"
GREATER = "greater"
EQUAL = "equal"
PARALLEL = "parallel"


class ParallelismWarning(UserWarning):
    """Raised when a partition bin is too wide for the order to mean much."""


@dataclass(frozen=True)
class LabeledPoint:
    vector: tuple
    origin: str
    index: int

    def __post_init__(self):
        if self.origin not in ("R", "W"):
            raise ArgumentError(f"origin must be 'R' or 'W', got {self.origin!r}")
        vec = tuple(float(v) for v in self.vector)
        if not all(np.isfinite(v) for v in vec):
            raise ArgumentError("point components must be finite")
        object.__setattr__(self, "vector", vec)


def label_points(r_values, w_values):
    """Merge two (n, d) arrays into one labeled point list."""
    r_values = np.atleast_2d(np.asarray(r_values, dtype=np.float64))
    w_values = np.atleast_2d(np.asarray(w_values, dtype=np.float64))
    if r_values.shape[1] != w_values.shape[1]:
        raise ArgumentError("R and W must share a dimension")
    points = [LabeledPoint(tuple(v), "R", i) for i, v in enumerate(r_values)]
    points += [LabeledPoint(tuple(v), "W", len(points) + i) for i, v in enumerate(w_values)]
    return points


def dominance(a, b) -> str:
    """Componentwise order of two vectors: less, greater, equal or parallel."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ArgumentError("dimension mismatch")
    le = bool(np.all(a <= b))
    ge = bool(np.all(a >= b))
    if le and ge:
        return EQUAL
    if le:
        return LESS
    if ge:
        return GREATER
    return PARALLEL


@dataclass(frozen=True)
class _Node:
    """A distinct vector with per-origin multiplicity (duplicates collapse)."""

    vector: tuple
    count_r: int
    count_w: int

    @property
    def total(self):
        return self.count_r + self.count_w


@dataclass
class PosetDag:
    """Dominance DAG over distinct vectors plus synthetic source and sink.

    nodes[0] is the source, nodes[-1] the sink; edges (i, j) mean
    vector_i < vector_j in the dominance order.
    """

    nodes: list
    edges: set
    parallelism: int = 0

    @property
    def source(self):
        return 0

    @property
    def sink(self):
        return len(self.nodes) - 1


@dataclass
class TopoPartition:
    """Ordered bins of labeled multiplicities.

    Each bin entry is a _Node; bins are ordered by traversal depth and
    lexicographically inside a bin.
    """

    bins: list
    method: str
    parallelism: int = field(init=False)

    def __post_init__(self):
        self.parallelism = max((len(b) for b in self.bins), default=0)

    def positions(self):
        """Flat traversal order: (position starting at 1, node)."""
        pos = 0
        for bin_nodes in self.bins:
            for node in bin_nodes:
                pos += 1
                yield pos, node

    def total_points(self):
        return sum(node.total for _, node in self.positions())


def _collapse(points):
    """Group equal vectors into _Node records, lexicographically sorted."""
    groups = {}
    for p in points:
        entry = groups.setdefault(p.vector, [0, 0])
        entry[0 if p.origin == "R" else 1] += 1
    return [_Node(vec, cr, cw) for vec, (cr, cw) in sorted(groups.items())]


def _check_points(points):
    if len(points) < 2:
        raise ArgumentError("need at least 2 points")
    d = len(points[0].vector)
    if any(len(p.vector) != d for p in points):
        raise ArgumentError("points must share a dimension")


def build_poset(points) -> PosetDag:
    """Dominance DAG with synthetic source below and sink above all points.

    The lexicographic presort means an edge can only run from an earlier
    node to a later one, so only ordered pairs are examined.
    """
    _check_points(points)
    inner = _collapse(points)
    d = len(inner[0].vector)
    mins = np.min([n.vector for n in inner], axis=0) - 1.0
    maxs = np.max([n.vector for n in inner], axis=0) + 1.0
    source = _Node(tuple(mins), 0, 0)
    sink = _Node(tuple(maxs), 0, 0)
    nodes = [source] + inner + [sink]
    vectors = np.array([n.vector for n in nodes])
    edges = set()
    n = len(nodes)
    for i in range(n - 1):
        # lexicographic order puts every dominator of i after it
        later = vectors[i + 1 :]
        dominated = np.all(vectors[i] <= later, axis=1)
        for off in np.flatnonzero(dominated):
            edges.add((i, i + 1 + int(off)))
    return PosetDag(nodes=nodes, edges=edges)


def topo_partition_poset(dag: PosetDag) -> TopoPartition:
    """Bin nodes by longest-path depth from the source.

    Longest-path levels guarantee that a dominated point lands in an
    earlier bin than any of its dominators.
    """
    n = len(dag.nodes)
    depth = np.zeros(n, dtype=np.int64)
    preds = [[] for _ in range(n)]
    for i, j in dag.edges:
        preds[j].append(i)
    # nodes are lexicographically sorted, so index order is a topological order
    for j in range(n):
        if preds[j]:
            depth[j] = max(depth[i] for i in preds[j]) + 1
    bins = {}
    for idx in range(1, n - 1):
        bins.setdefault(int(depth[idx]), []).append(dag.nodes[idx])
    ordered = [sorted(bins[k], key=lambda node: node.vector) for k in sorted(bins)]
    partition = TopoPartition(bins=ordered, method="poset")
    _warn_if_too_parallel(partition)
    return partition


@dataclass
class SpanningTree:
    nodes: list
    edges: list  # (i, j, distance)
    total_weight: float


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        self.parent[rj] = ri
        return True


def build_mst(points) -> SpanningTree:
    """Minimum spanning tree over Euclidean distances.

    Edges are sorted ascending (ties broken by index pair) and inserted
    whenever they join two components.
    """
    _check_points(points)
    nodes = _collapse(points)
    vectors = np.array([n.vector for n in nodes])
    n = len(nodes)
    if n == 1:
        return SpanningTree(nodes=nodes, edges=[], total_weight=0.0)
    diff = vectors[:, None, :] - vectors[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    iu, ju = np.triu_indices(n, k=1)
    order = np.lexsort((ju, iu, dist[iu, ju]))
    uf = _UnionFind(n)
    edges = []
    for k in order:
        i, j = int(iu[k]), int(ju[k])
        if uf.union(i, j):
            edges.append((i, j, float(dist[i, j])))
            if len(edges) == n - 1:
                break
    return SpanningTree(nodes=nodes, edges=edges, total_weight=float(sum(e[2] for e in edges)))


def topo_partition_mst(tree: SpanningTree) -> TopoPartition:
    """Peel the tree layer by layer starting from its leaves.

    X_1 holds all degree-1 nodes; each next layer holds the nodes whose
    remaining degree drops to <= 1 once earlier layers are removed. The
    final layer contains one or two roots.
    """
    n = len(tree.nodes)
    if n == 1:
        partition = TopoPartition(bins=[list(tree.nodes)], method="mst")
        return partition
    adj = [set() for _ in range(n)]
    for i, j, _ in tree.edges:
        adj[i].add(j)
        adj[j].add(i)
    removed = [False] * n
    bins = []
    remaining = n
    while remaining:
        layer = [i for i in range(n) if not removed[i] and len(adj[i]) <= 1]
        if not layer:
            raise ArgumentError("edges do not form a tree")
        for i in layer:
            removed[i] = True
        for i in layer:
            for j in list(adj[i]):
                adj[j].discard(i)
            adj[i].clear()
        bins.append(sorted((tree.nodes[i] for i in layer), key=lambda node: node.vector))
        remaining -= len(layer)
    partition = TopoPartition(bins=bins, method="mst")
    _warn_if_too_parallel(partition)
    return partition


def _warn_if_too_parallel(partition: TopoPartition):
    total = partition.total_points()
    if total and partition.parallelism > total / 4:
        warnings.warn(
            f"partition has {partition.parallelism} mutually unordered points "
            f"out of {total}; the sample may be too small for a meaningful order",
            ParallelismWarning,
            stacklevel=3,
        )


def ecdf_from_partition(partition: TopoPartition, origin: str) -> Ecdf1D:
    """Read one origin's ECDF off the traversal order.

    Traversal positions 1..n serve as the 1-D support; the cumulative
    value at position k is the fraction of that origin's points seen so
    far.
    """
    if origin not in ("R", "W"):
        raise ArgumentError(f"origin must be 'R' or 'W', got {origin!r}")
    support = []
    counts = []
    for pos, node in partition.positions():
        c = node.count_r if origin == "R" else node.count_w
        if c:
            support.append(pos)
            counts.append(c)
    if not support:
        raise ArgumentError(f"partition contains no {origin} points")
    total = sum(counts)
    cum = np.cumsum(counts) / total
    return Ecdf1D(support=np.array(support, dtype=np.float64), cum=cum, n=total)


def ordered_partition(r_values, w_values, method="poset") -> TopoPartition:
    """Full pipeline: label, order by the chosen method, partition."""
    points = label_points(r_values, w_values)
    if method == "poset":
        return topo_partition_poset(build_poset(points))
    if method == "mst":
        return topo_partition_mst(build_mst(points))
    raise ArgumentError(f"unknown ordering method {method!r}")

"""Immutable simple undirected graphs and the traversal primitives built on them.

A :class:`Snapshot` stores its adjacency in CSR form (``indptr``/``indices``)
together with the id of the edge behind every adjacency entry, which lets the
removal kernels mask nodes and edges without rebuilding the graph.
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc
from scipy.sparse.csgraph import minimum_spanning_tree, shortest_path

from .errors import GraphError

__all__ = [
    "Snapshot",
    "Components",
    "bfs_from",
    "all_pairs_distances",
    "connected_components",
    "diameter",
    "generate",
    "GENERATORS",
]

log = logging.getLogger(__name__)


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Snapshot:
    """A simple undirected graph with a fixed dense node indexing.

    Build instances with :meth:`from_edges`; the constructor expects
    already-validated CSR arrays.

    Attributes
    ----------
    n, m : int
        Node and edge counts.
    edges : ndarray, shape (m, 2)
        Edge endpoints with ``u < v``, sorted lexicographically. Row ``e`` is
        edge index ``e``.
    indptr, indices, edge_of : ndarray
        CSR adjacency. ``indices[indptr[i]:indptr[i+1]]`` are the sorted
        neighbours of ``i``; ``edge_of`` holds the matching edge indices.
    ids : tuple of str
        Element id of every dense node index.
    edge_ids : tuple of str
        Element id of every edge index.
    year : int or None
    origin : ndarray
        For graphs produced by :func:`gridvuln.attack.remove`, the node index
        each surviving node had in the parent graph. Identity otherwise.
    """

    n: int
    m: int
    edges: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    edge_of: np.ndarray
    ids: tuple
    edge_ids: tuple
    year: object = None
    origin: np.ndarray = None
    node_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "node_index", {nid: i for i, nid in enumerate(self.ids)})
        if self.origin is None:
            object.__setattr__(self, "origin", _frozen(np.arange(self.n), np.int64))

    @classmethod
    def from_edges(cls, n, edges, ids=None, edge_ids=None, year=None, origin=None):
        """Build a snapshot on ``n`` nodes from an iterable of index pairs.

        Parallel edges are collapsed (the first occurrence in sorted order
        keeps its id) and logged; self-loops raise :class:`GraphError`.
        """
        n = int(n)
        if n < 0:
            raise GraphError(f"node count must be non-negative, got {n}")
        pairs = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                           dtype=np.int64).reshape(-1, 2)
        if edge_ids is None:
            edge_ids = [f"e{i}" for i in range(len(pairs))]
        edge_ids = list(edge_ids)
        if len(edge_ids) != len(pairs):
            raise GraphError("edge_ids length does not match edge count")
        if len(pairs) and (pairs.min() < 0 or pairs.max() >= n):
            raise GraphError("edge endpoint out of range")
        loops = pairs[:, 0] == pairs[:, 1]
        if loops.any():
            raise GraphError(f"self-loop on node {int(pairs[loops][0, 0])}")
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        order = sorted(range(len(pairs)), key=lambda e: (lo[e], hi[e], edge_ids[e]))
        kept, kept_ids, seen = [], [], set()
        for e in order:
            key = (int(lo[e]), int(hi[e]))
            if key in seen:
                log.warning("collapsing parallel edge %s between nodes %d and %d", edge_ids[e], *key)
                continue
            seen.add(key)
            kept.append(key)
            kept_ids.append(edge_ids[e])
        uv = np.array(kept, dtype=np.int64).reshape(-1, 2)
        m = len(uv)

        # CSR with both directions; stable sort keeps neighbours ascending
        src = np.concatenate([uv[:, 0], uv[:, 1]])
        dst = np.concatenate([uv[:, 1], uv[:, 0]])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((dst, src))
        src, dst, eid = src[order], dst[order], eid[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        indptr = np.cumsum(indptr)

        if ids is None:
            ids = [str(i) for i in range(n)]
        ids = tuple(str(x) for x in ids)
        if len(ids) != n or len(set(ids)) != n:
            raise GraphError("node ids must be unique and match the node count")
        return cls(
            n=n,
            m=m,
            edges=_frozen(uv, np.int64),
            indptr=_frozen(indptr, np.int64),
            indices=_frozen(dst, np.int64),
            edge_of=_frozen(eid, np.int64),
            ids=ids,
            edge_ids=tuple(kept_ids),
            year=year,
            origin=None if origin is None else _frozen(origin, np.int64),
        )

    @property
    def degrees(self):
        return np.diff(self.indptr)

    @property
    def avg_degree(self):
        return 2.0 * self.m / self.n if self.n else 0.0

    def neighbors(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def to_csr(self):
        data = np.ones(len(self.indices), dtype=np.float64)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def to_json(self):
        """Byte-stable JSON export with ids in lexicographic order."""
        nodes = sorted(self.ids)
        pairs = sorted(tuple(sorted((self.ids[u], self.ids[v]))) for u, v in self.edges)
        doc = {"year": self.year, "nodes": nodes, "edges": [list(p) for p in pairs]}
        return json.dumps(doc, separators=(",", ":"), ensure_ascii=False)

    def __repr__(self):
        return f"Snapshot(n={self.n}, m={self.m}, year={self.year})"


def bfs_from(g, source):
    """Unweighted hop distances from ``source``; unreachable nodes get ``inf``."""
    if not 0 <= source < g.n:
        raise GraphError(f"source {source} out of range for {g.n} nodes")
    return shortest_path(g.to_csr(), method="D", unweighted=True, indices=source)


def all_pairs_distances(g):
    """Dense ``(n, n)`` hop-distance table with ``inf`` for unreachable pairs."""
    if g.n == 0:
        return np.zeros((0, 0))
    return shortest_path(g.to_csr(), method="D", unweighted=True, directed=False)


@dataclass(frozen=True)
class Components:
    labels: np.ndarray
    count: int
    largest: int
    largest_nodes: int
    largest_edges: int


def connected_components(g):
    """Label connected components and describe the largest one.

    Labels are assigned in order of each component's smallest node index, so
    ties in size resolve to the component holding the smallest index.
    """
    if g.n == 0:
        return Components(np.zeros(0, dtype=np.int64), 0, -1, 0, 0)
    _, raw = _cc(g.to_csr(), directed=False)
    # relabel by first appearance
    _, first = np.unique(raw, return_index=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first)] = np.arange(len(first))
    labels = rank[raw]
    sizes = np.bincount(labels)
    largest = int(np.argmax(sizes))
    edge_labels = labels[g.edges[:, 0]] if g.m else np.zeros(0, dtype=np.int64)
    return Components(
        labels=labels,
        count=len(sizes),
        largest=largest,
        largest_nodes=int(sizes[largest]),
        largest_edges=int(np.sum(edge_labels == largest)),
    )


def diameter(g):
    """Longest finite shortest path inside the largest connected component."""
    if g.n < 1:
        raise GraphError("diameter needs at least one node")
    comps = connected_components(g)
    members = np.flatnonzero(comps.labels == comps.largest)
    d = shortest_path(g.to_csr(), method="D", unweighted=True, indices=members)
    return int(d[:, members].max())


# -- generators --------------------------------------------------------------

def _rng(seed):
    return np.random.default_rng(seed)


def _ring(n, k=2, seed=None):
    """Ring lattice; every node links to its ``k // 2`` neighbours on each side."""
    if n < 3 or k < 2 or k % 2 or k >= n:
        raise GraphError("ring needs n >= 3 and an even k with 2 <= k < n")
    edges = [(i, (i + j) % n) for i in range(n) for j in range(1, k // 2 + 1)]
    return Snapshot.from_edges(n, edges)


def _path(n, seed=None):
    if n < 1:
        raise GraphError("path needs n >= 1")
    return Snapshot.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def _star(n, seed=None):
    if n < 1:
        raise GraphError("star needs n >= 1")
    return Snapshot.from_edges(n, [(0, i) for i in range(1, n)])


def _complete(n, seed=None):
    if n < 1:
        raise GraphError("complete graph needs n >= 1")
    iu = np.triu_indices(n, 1)
    return Snapshot.from_edges(n, np.column_stack(iu))


def _erdos_renyi(n, p=None, m=None, seed=None):
    """G(n, p) when ``p`` is given, otherwise G(n, m) with exactly ``m`` edges."""
    if n < 1 or (p is None) == (m is None):
        raise GraphError("erdos_renyi needs n >= 1 and exactly one of p, m")
    rng = _rng(seed)
    iu = np.column_stack(np.triu_indices(n, 1))
    if p is not None:
        if not 0.0 <= p <= 1.0:
            raise GraphError(f"p must lie in [0, 1], got {p}")
        keep = rng.random(len(iu)) < p
        return Snapshot.from_edges(n, iu[keep])
    if not 0 <= m <= len(iu):
        raise GraphError(f"m must lie in [0, {len(iu)}], got {m}")
    pick = rng.choice(len(iu), size=m, replace=False)
    return Snapshot.from_edges(n, iu[np.sort(pick)])


def _preferential_attachment(n, m=1, seed=None):
    """Growth with ``m`` degree-proportional links per new node.

    Starts from a star on ``m + 1`` nodes; each newcomer picks ``m`` distinct
    targets with probability proportional to current degree.
    """
    if m < 1 or n < m + 1:
        raise GraphError("preferential_attachment needs m >= 1 and n >= m + 1")
    rng = _rng(seed)
    edges = [(0, i) for i in range(1, m + 1)]
    # every edge endpoint appears once per incident edge
    pool = np.empty(2 * (m + (n - m - 1) * m), dtype=np.int64)
    pool[: 2 * m : 2] = 0
    pool[1 : 2 * m : 2] = np.arange(1, m + 1)
    fill = 2 * m
    for v in range(m + 1, n):
        targets = set()
        while len(targets) < m:
            targets.add(int(pool[rng.integers(fill)]))
        for t in sorted(targets):
            edges.append((t, v))
            pool[fill] = t
            pool[fill + 1] = v
            fill += 2
    return Snapshot.from_edges(n, edges)


def _spatial(n, m, seed=None):
    """Grid-like planar-ish graph: Euclidean MST plus the shortest extra links.

    Nodes are uniform points in the unit square. Useful as a stand-in for a
    transmission network of a given size.
    """
    if n < 2 or not n - 1 <= m <= n * (n - 1) // 2:
        raise GraphError("spatial needs n >= 2 and n - 1 <= m <= n(n-1)/2")
    rng = _rng(seed)
    pts = rng.random((n, 2))
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    tree = minimum_spanning_tree(d).tocoo()
    edges = {tuple(sorted((int(a), int(b)))) for a, b in zip(tree.row, tree.col)}
    iu, ju = np.triu_indices(n, 1)
    for e in np.argsort(d[iu, ju], kind="stable"):
        if len(edges) >= m:
            break
        edges.add((int(iu[e]), int(ju[e])))
    return Snapshot.from_edges(n, sorted(edges))


GENERATORS = {
    "ring": _ring,
    "path": _path,
    "star": _star,
    "complete": _complete,
    "erdos_renyi": _erdos_renyi,
    "preferential_attachment": _preferential_attachment,
    "spatial": _spatial,
}


def generate(model, seed=None, **params):
    """Build a fixture graph by model name.

    >>> sorted(generate("star", n=4).degrees.tolist())
    [1, 1, 1, 3]
    """
    try:
        fn = GENERATORS[model]
    except KeyError:
        raise GraphError(f"unknown model {model!r}; choose from {sorted(GENERATORS)}") from None
    try:
        return fn(seed=seed, **params)
    except TypeError as exc:
        raise GraphError(f"invalid parameters for {model}: {exc}") from None


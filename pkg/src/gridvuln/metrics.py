"""Per-snapshot complex-network metrics.

All functions are pure and operate on :class:`~gridvuln.graph.Snapshot`.
Distances are hop counts; unreachable pairs contribute nothing to path-length
averages and zero to efficiency.
"""

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import UndefinedMetricError
from .graph import Snapshot, all_pairs_distances, connected_components, diameter, generate

__all__ = [
    "efficiency",
    "avg_path_length",
    "clustering",
    "modularity",
    "Partition",
    "detect_communities",
    "small_world_sigma",
    "MetricsReport",
    "compute_metrics",
    "METRICS_COLUMNS",
]

log = logging.getLogger(__name__)


def efficiency(g, dist=None):
    """Mean reciprocal hop distance over all ordered node pairs.

    Parameters
    ----------
    g : Snapshot
    dist : ndarray, optional
        Precomputed :func:`~gridvuln.graph.all_pairs_distances` of ``g``.

    Returns
    -------
    float
        Value in ``[0, 1]``; equals 1 only for complete graphs.

    Examples
    --------
    >>> efficiency(generate("path", n=3))  # doctest: +ELLIPSIS
    0.8333...
    """
    if g.n < 2:
        raise UndefinedMetricError(f"efficiency needs at least 2 nodes, got {g.n}")
    if dist is None:
        dist = all_pairs_distances(g)
    off = ~np.eye(g.n, dtype=bool)
    with np.errstate(divide="ignore"):
        inv = 1.0 / dist[off]
    return float(inv.sum() / (g.n * (g.n - 1)))


def avg_path_length(g, dist=None):
    """Mean hop distance over reachable ordered pairs of distinct nodes."""
    if g.m == 0:
        raise UndefinedMetricError("average path length is undefined for a graph without edges")
    if dist is None:
        dist = all_pairs_distances(g)
    d = dist[~np.eye(g.n, dtype=bool)]
    d = d[np.isfinite(d)]
    return float(d.mean())


def _local_clustering(g):
    deg = g.degrees
    out = np.zeros(g.n)
    for i in range(g.n):
        k = deg[i]
        if k < 2:
            continue
        nb = g.neighbors(i)
        # triangles through i: neighbours of each neighbour that are also neighbours of i
        links = sum(np.intersect1d(g.neighbors(j), nb, assume_unique=True).size for j in nb) // 2
        out[i] = 2.0 * links / (k * (k - 1))
    return out


def clustering(g):
    """Average local clustering; nodes of degree below 2 count as zero."""
    if g.n < 1:
        raise UndefinedMetricError("clustering needs at least one node")
    return float(_local_clustering(g).mean())


@dataclass(frozen=True)
class Partition:
    labels: np.ndarray

    @property
    def count(self):
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    @classmethod
    def from_labels(cls, labels):
        """Relabel arbitrary hashable labels to ``0..c-1`` by first appearance."""
        seen = {}
        out = np.array([seen.setdefault(x, len(seen)) for x in labels], dtype=np.int64)
        out.setflags(write=False)
        return cls(out)

    def communities(self):
        return [np.flatnonzero(self.labels == c) for c in range(self.count)]


def modularity(g, partition, normalization="standard"):
    """Newman modularity of ``partition``.

    ``normalization="standard"`` uses the ``2m`` null model. ``"avg_degree"``
    evaluates the same sum with the average degree in place of ``2m`` in both
    positions; it is kept only for comparison and is not bounded by 1.
    """
    labels = partition.labels if isinstance(partition, Partition) else np.asarray(partition)
    if len(labels) != g.n:
        raise ValueError(f"partition labels {len(labels)} nodes, graph has {g.n}")
    if g.m == 0:
        raise UndefinedMetricError("modularity is undefined for a graph without edges")
    if normalization == "standard":
        norm = 2.0 * g.m
    elif normalization == "avg_degree":
        norm = g.avg_degree
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    deg = g.degrees.astype(float)
    same = labels[g.edges[:, 0]] == labels[g.edges[:, 1]]
    inside = 2.0 * same.sum()  # sum of A_ij over same-community ordered pairs
    _, inv = np.unique(labels, return_inverse=True)
    dsum = np.bincount(inv, weights=deg)
    return float((inside - (dsum ** 2).sum() / norm) / norm)


def detect_communities(g, seed=0):
    """Greedy agglomerative modularity maximisation.

    Starts from singletons and repeatedly merges the pair of adjacent
    communities with the largest modularity gain until no merge improves
    ``Q``. Equal gains are resolved by a seeded random draw. The result is
    never worse than putting every node in one community.

    Returns
    -------
    Partition
        Labels numbered by first appearance in node order.
    """
    if g.m == 0:
        raise UndefinedMetricError("community detection needs at least one edge")
    rng = np.random.default_rng(seed)
    two_m = 2.0 * g.m
    a = {i: d / two_m for i, d in enumerate(g.degrees)}
    # e[c][d]: fraction of edge endpoints joining c and d (symmetric, one direction)
    e = {i: {} for i in range(g.n)}
    for u, v in g.edges:
        u, v = int(u), int(v)
        e[u][v] = e[u].get(v, 0.0) + 1.0 / two_m
        e[v][u] = e[v].get(u, 0.0) + 1.0 / two_m
    members = {i: [i] for i in range(g.n)}

    while True:
        best, cands = 0.0, []
        for c, row in e.items():
            for d, ecd in row.items():
                if d <= c:
                    continue
                gain = 2.0 * (ecd - a[c] * a[d])
                if gain > best + 1e-12:
                    best, cands = gain, [(c, d)]
                elif cands and abs(gain - best) <= 1e-12:
                    cands.append((c, d))
        if not cands:
            break
        c, d = cands[rng.integers(len(cands))] if len(cands) > 1 else cands[0]
        # fold d into c
        for x, exd in e.pop(d).items():
            if x == c:
                continue
            e[x].pop(d)
            e[c][x] = e[c].get(x, 0.0) + exd
            e[x][c] = e[c][x]
        e[c].pop(d, None)
        a[c] += a.pop(d)
        members[c].extend(members.pop(d))

    labels = np.empty(g.n, dtype=np.int64)
    for c, nodes in members.items():
        labels[nodes] = c
    part = Partition.from_labels(labels)
    if modularity(g, part) < 0.0:
        return Partition.from_labels(np.zeros(g.n, dtype=np.int64))
    return part


def _largest_component(g):
    comps = connected_components(g)
    keep = np.flatnonzero(comps.labels == comps.largest)
    if len(keep) == g.n:
        return g
    remap = -np.ones(g.n, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    mask = (comps.labels[g.edges[:, 0]] == comps.largest) if g.m else np.zeros(0, dtype=bool)
    return Snapshot.from_edges(len(keep), remap[g.edges[mask]], ids=[g.ids[i] for i in keep],
                               edge_ids=[g.edge_ids[i] for i in np.flatnonzero(mask)], year=g.year)


def small_world_sigma(g, baseline="analytic", seed=0, ensemble=20):
    """Small-world coefficient ``(C / C_rand) / (L / L_rand)``.

    Computed on the largest connected component. The ``"analytic"`` baseline
    uses ``C_rand = <k>/N`` and ``L_rand = ln N / ln <k>``; ``"ensemble"``
    averages ``C`` and ``L`` over ``ensemble`` random graphs with the same
    node and edge counts, seeded ``seed, seed + 1, ...``.
    """
    h = _largest_component(g)
    k = h.avg_degree
    if h.n < 4 or k <= 1.0:
        raise UndefinedMetricError(
            f"small-world baseline undefined (largest component N={h.n}, <k>={k:.3f})"
        )
    c = clustering(h)
    length = avg_path_length(h)
    if baseline == "analytic":
        c_rand = k / h.n
        l_rand = math.log(h.n) / math.log(k)
    elif baseline == "ensemble":
        cs, ls = [], []
        for s in range(ensemble):
            r = generate("erdos_renyi", n=h.n, m=h.m, seed=seed + s)
            cs.append(clustering(r))
            ls.append(avg_path_length(r))
        c_rand, l_rand = float(np.mean(cs)), float(np.mean(ls))
        if c_rand == 0.0:
            raise UndefinedMetricError("random baseline has zero clustering")
    else:
        raise ValueError(f"unknown baseline {baseline!r}")
    return float((c / c_rand) / (length / l_rand))


METRICS_COLUMNS = ("year", "n", "m", "avg_degree", "diameter", "Q", "L", "C", "sigma", "eff")


@dataclass(frozen=True)
class MetricsReport:
    year: object
    n: int
    m: int
    avg_degree: float
    diameter: int
    Q: float
    L: float
    C: float
    sigma: float
    eff: float

    def as_dict(self):
        return asdict(self)

    def csv_row(self):
        out = []
        for name in METRICS_COLUMNS:
            v = getattr(self, name)
            out.append(f"{v:.6f}" if isinstance(v, float) else str(v))
        return out


def compute_metrics(g, seed=0, modularity_normalization="standard", sigma_baseline="analytic"):
    """Evaluate every per-snapshot metric on ``g``."""
    dist = all_pairs_distances(g)
    part = detect_communities(g, seed=seed)
    return MetricsReport(
        year=g.year,
        n=g.n,
        m=g.m,
        avg_degree=g.avg_degree,
        diameter=diameter(g),
        Q=modularity(g, part, normalization=modularity_normalization),
        L=avg_path_length(g, dist),
        C=clustering(g),
        sigma=small_world_sigma(g, baseline=sigma_baseline, seed=seed),
        eff=efficiency(g, dist),
    )

"""Compiled kernels for repeated efficiency evaluation under removals.

Each batch row is a set of node or edge indices to delete. Rows are evaluated
independently against a private mask and BFS workspace, so disjoint row
ranges can be processed on separate threads (the kernels release the GIL).
Shortest-path sums use a 64-source bit-parallel BFS.
"""

import numpy as np
from numba import njit

KIND_NODE = 0
KIND_EDGE = 1


@njit(cache=True, nogil=True, inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True, nogil=True)
def _reciprocal_sum(indptr, indices, edge_of, node_alive, edge_alive, order,
                    seen, front, nxt, cur, new, counts):
    """Sum of 1/d over ordered pairs of alive nodes joined by alive edges.

    Bit-parallel BFS: 64 sources (consecutive in ``order``) advance together,
    one bit each. Pair counts are accumulated per distance as integers, so the
    result does not depend on ``order``; a locality-preserving order only
    makes the frontiers overlap and the sweep cheaper.
    """
    n = len(indptr) - 1
    for b0 in range(0, n, 64):
        nc = 0
        for j in range(min(64, n - b0)):
            s = order[b0 + j]
            if node_alive[s]:
                bit = np.uint64(1) << np.uint64(j)
                seen[s] = bit
                front[s] = bit
                cur[nc] = s
                nc += 1
        d = 0
        while nc > 0:
            d += 1
            nn = 0
            for a in range(nc):
                u = cur[a]
                fu = front[u]
                for p in range(indptr[u], indptr[u + 1]):
                    v = indices[p]
                    if not node_alive[v] or not edge_alive[edge_of[p]]:
                        continue
                    bits = fu & ~seen[v]
                    if bits:
                        if nxt[v] == 0:
                            new[nn] = v
                            nn += 1
                        nxt[v] |= bits
            for a in range(nc):
                front[cur[a]] = 0
            found = 0
            for a in range(nn):
                v = new[a]
                x = nxt[v]
                found += _popcount(x)
                seen[v] |= x
                front[v] = x
                nxt[v] = 0
                cur[a] = v
            nc = nn
            counts[d] += found
        for i in range(n):
            seen[i] = 0
    total = 0.0
    for d in range(1, n):
        if counts[d]:
            total += counts[d] / d
            counts[d] = 0
    return total


@njit(cache=True, nogil=True)
def _largest_component_edges(indptr, indices, edge_of, node_alive, edge_alive, label, queue):
    """Alive-edge count inside the largest alive component.

    Size ties go to the component containing the smallest node index.
    """
    n = len(indptr) - 1
    for i in range(n):
        label[i] = -1
    best_size = 0
    best_edges = 0
    for s in range(n):
        if not node_alive[s] or label[s] >= 0:
            continue
        label[s] = s
        head = 0
        tail = 1
        queue[0] = s
        twice_edges = 0
        while head < tail:
            u = queue[head]
            head += 1
            for p in range(indptr[u], indptr[u + 1]):
                if not edge_alive[edge_of[p]]:
                    continue
                v = indices[p]
                if not node_alive[v]:
                    continue
                twice_edges += 1
                if label[v] < 0:
                    label[v] = s
                    queue[tail] = v
                    tail += 1
        if tail > best_size:
            best_size = tail
            best_edges = twice_edges // 2
    return best_edges


@njit(cache=True, nogil=True)
def evaluate_batch(indptr, indices, edge_of, edges, order, targets, kind, start, stop,
                   out_sum, out_alive, out_gcc, out_incident):
    """Evaluate removal rows ``start:stop`` of ``targets``.

    Writes per row: the reciprocal-distance sum over surviving ordered pairs,
    the surviving node count, edges inside the largest surviving component,
    and the number of edges lost (directly removed or incident to a removed
    node).
    """
    n = len(indptr) - 1
    m = edges.shape[0]
    node_alive = np.ones(n, dtype=np.bool_)
    edge_alive = np.ones(m, dtype=np.bool_)
    seen = np.zeros(n, dtype=np.uint64)
    front = np.zeros(n, dtype=np.uint64)
    nxt = np.zeros(n, dtype=np.uint64)
    cur = np.empty(n, dtype=np.int64)
    new = np.empty(n, dtype=np.int64)
    counts = np.zeros(n + 1, dtype=np.int64)
    k = targets.shape[1]
    for r in range(start, stop):
        if kind == KIND_NODE:
            for j in range(k):
                node_alive[targets[r, j]] = False
            lost = 0
            for e in range(m):
                if not node_alive[edges[e, 0]] or not node_alive[edges[e, 1]]:
                    lost += 1
            out_alive[r] = n - k
        else:
            for j in range(k):
                edge_alive[targets[r, j]] = False
            lost = k
            out_alive[r] = n
        out_incident[r] = lost
        out_sum[r] = _reciprocal_sum(indptr, indices, edge_of, node_alive, edge_alive, order,
                                     seen, front, nxt, cur, new, counts)
        out_gcc[r] = _largest_component_edges(indptr, indices, edge_of, node_alive, edge_alive,
                                              cur, new)
        if kind == KIND_NODE:
            for j in range(k):
                node_alive[targets[r, j]] = True
        else:
            for j in range(k):
                edge_alive[targets[r, j]] = True


@njit(cache=True, nogil=True)
def sample_subsets(count, draws):
    """One uniform subset per row of ``draws`` via a partial Fisher-Yates shuffle.

    ``draws[r, i]`` is a uniform float in ``[0, 1)`` choosing the swap partner
    for slot ``i`` among the not-yet-fixed tail of ``0..count-1``.
    """
    rows, k = draws.shape
    out = np.empty((rows, k), dtype=np.int64)
    perm = np.arange(count)
    for r in range(rows):
        for i in range(count):
            perm[i] = i
        for i in range(k):
            j = i + int(draws[r, i] * (count - i))
            if j >= count:
                j = count - 1
            t = perm[i]
            perm[i] = perm[j]
            perm[j] = t
            out[r, i] = perm[i]
    return out

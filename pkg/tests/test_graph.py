import itertools
import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from gridvuln.errors import GraphError
from gridvuln.graph import (Snapshot, all_pairs_distances, bfs_from, connected_components,
                            diameter, generate)


def two_triangles():
    return Snapshot.from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)])


@st.composite
def graphs(draw, n_max=9):
    n = draw(st.integers(1, n_max))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return n, sorted(chosen)


def test_bfs_path():
    assert bfs_from(generate("path", n=3), 0).tolist() == [0, 1, 2]


def test_bfs_unreachable():
    g = Snapshot.from_edges(4, [(0, 1), (2, 3)])
    assert bfs_from(g, 0).tolist() == [0, 1, np.inf, np.inf]


def test_bfs_complete():
    g = generate("complete", n=4)
    for s in range(4):
        d = bfs_from(g, s)
        assert sorted(d.tolist()) == [0, 1, 1, 1]


def test_bfs_out_of_range():
    with pytest.raises(GraphError):
        bfs_from(generate("path", n=3), 3)


def test_cycle_rows_are_permutations():
    d = all_pairs_distances(generate("ring", n=5, k=2))
    for row in d:
        assert sorted(row.tolist()) == [0, 1, 1, 2, 2]


def test_complete_all_ones():
    d = all_pairs_distances(generate("complete", n=4))
    assert np.array_equal(d, 1 - np.eye(4))


def test_distances_match_relaxation_oracle():
    for n, edges in oracles.random_instances(200, 7, seed=11, n_min=1):
        d = all_pairs_distances(Snapshot.from_edges(n, edges))
        ref = np.array(oracles.floyd_warshall(n, edges), dtype=float)
        assert np.array_equal(d, ref)
        for s in range(n):
            assert np.array_equal(bfs_from(Snapshot.from_edges(n, edges), s), ref[s])


def test_components_two_triangles():
    c = connected_components(two_triangles())
    assert c.count == 2
    assert (c.largest_nodes, c.largest_edges) == (3, 3)
    assert c.largest == 0  # tie goes to the component holding node 0


def test_components_empty_graph():
    c = connected_components(Snapshot.from_edges(4, []))
    assert c.count == 4 and c.largest_nodes == 1 and c.largest_edges == 0


def test_star_minus_hub():
    from gridvuln.attack import remove
    c = connected_components(remove(generate("star", n=4), "node", [0]))
    assert c.count == 3


@pytest.mark.parametrize("g, expected", [
    (generate("path", n=6), 5),
    (generate("complete", n=4), 1),
    (two_triangles(), 1),
])
def test_diameter(g, expected):
    assert diameter(g) == expected


def _double_bfs(n, edges):
    d = oracles.floyd_warshall(n, edges)
    far = max(range(n), key=lambda j: d[0][j])
    return max(d[far])


def test_tree_diameter_double_bfs():
    rng = random.Random(5)
    for _ in range(50):
        n = rng.randint(2, 30)
        edges = [(rng.randrange(i), i) for i in range(1, n)]
        g = Snapshot.from_edges(n, edges)
        assert diameter(g) == _double_bfs(n, edges) <= n - 1


@settings(max_examples=100, deadline=None)
@given(graphs())
def test_handshake_and_symmetry(graph):
    n, edges = graph
    g = Snapshot.from_edges(n, edges)
    assert g.degrees.sum() == 2 * g.m
    for i in range(n):
        nb = g.neighbors(i).tolist()
        assert nb == sorted(set(nb)) and i not in nb
        for j in nb:
            assert i in g.neighbors(j)
    assert diameter(g) <= n - 1


def test_star_degrees():
    assert sorted(generate("star", n=4).degrees.tolist()) == [1, 1, 1, 3]


def test_er_p1_is_complete():
    g = generate("erdos_renyi", n=50, p=1.0, seed=3)
    assert g.m == 50 * 49 // 2


def test_preferential_attachment_deterministic():
    a = generate("preferential_attachment", n=200, m=2, seed=9)
    b = generate("preferential_attachment", n=200, m=2, seed=9)
    assert np.array_equal(a.edges, b.edges)
    assert a.m == 2 + 2 * (200 - 3)


@pytest.mark.parametrize("model, params", [
    ("ring", {"n": 4, "k": 3}),
    ("preferential_attachment", {"n": 2, "m": 2}),
    ("erdos_renyi", {"n": 5}),
    ("erdos_renyi", {"n": 5, "p": 1.5}),
    ("path", {"n": 0}),
    ("nope", {"n": 3}),
    ("star", {"n": 3, "bogus": 1}),
])
def test_generator_rejects_bad_params(model, params):
    with pytest.raises(GraphError):
        generate(model, **params)


@pytest.mark.parametrize("model, params", [
    ("ring", {"n": 12, "k": 4}),
    ("erdos_renyi", {"n": 30, "m": 40}),
    ("spatial", {"n": 40, "m": 60}),
    ("preferential_attachment", {"n": 60, "m": 3}),
])
def test_generators_simple(model, params):
    g = generate(model, seed=1, **params)
    assert g.degrees.sum() == 2 * g.m
    assert len({tuple(e) for e in g.edges.tolist()}) == g.m
    assert np.all(g.edges[:, 0] < g.edges[:, 1])


def test_parallel_edges_collapse(caplog):
    g = Snapshot.from_edges(3, [(0, 1), (1, 0), (1, 2)], edge_ids=["b", "a", "c"])
    assert g.m == 2
    assert g.edge_ids[0] == "a"
    assert "parallel" in caplog.text


def test_self_loop_rejected():
    with pytest.raises(GraphError):
        Snapshot.from_edges(3, [(1, 1)])


def test_snapshot_is_immutable():
    g = generate("path", n=4)
    with pytest.raises(ValueError):
        g.indices[0] = 3
    with pytest.raises(AttributeError):
        g.n = 5


def test_json_export_is_sorted():
    g = Snapshot.from_edges(3, [(2, 0), (1, 0)], ids=["b", "c", "a"], year=1990)
    doc = json.loads(g.to_json())
    assert doc == {"year": 1990, "nodes": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"]]}
    assert g.to_json() == Snapshot.from_edges(3, [(1, 0), (0, 2)], ids=["b", "c", "a"],
                                              year=1990).to_json()

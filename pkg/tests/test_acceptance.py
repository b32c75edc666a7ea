"""Acceptance suite: one test group per criterion.

Run with ``pytest tests/test_acceptance.py -s``; a PASS/FAIL line per
criterion is printed in the terminal summary.
"""

import itertools
import json
import time

import numpy as np
import pytest

import oracles
from gridvuln.attack import (RemovalScenario, _baseline, _evaluate, damage, run_scenario,
                             worst_element, worst_subset)
from gridvuln.cli import main
from gridvuln.degree import CumulativeDegreeDistribution, classify, fit
from gridvuln.graph import Snapshot, all_pairs_distances, connected_components, generate
from gridvuln.metrics import avg_path_length, clustering, efficiency, modularity
from gridvuln.timeline import build_timeline, damage_metric_report, growing_grid, campaign_scenarios

TIGHT = 1e-12


# 1 -------------------------------------------------------------------------

@pytest.mark.criterion(1, "oracle equivalence on 200 random graphs, N <= 7, 1e-12, < 10 s")
def test_oracle_equivalence():
    t0 = time.perf_counter()
    instances = oracles.random_instances(200, 7, seed=2024, n_min=2)
    disconnected = 0
    for n, edges in instances:
        g = Snapshot.from_edges(n, edges)
        ref = np.array(oracles.floyd_warshall(n, edges), dtype=float)
        assert np.array_equal(all_pairs_distances(g), ref)
        assert efficiency(g) == pytest.approx(oracles.efficiency(n, edges), abs=TIGHT)
        assert clustering(g) == pytest.approx(oracles.clustering(n, edges), abs=TIGHT)
        if edges:
            assert avg_path_length(g) == pytest.approx(oracles.avg_path_length(n, edges),
                                                       abs=TIGHT)
        disconnected += connected_components(g).count > 1
    elapsed = time.perf_counter() - t0
    print(f"\n[1] {len(instances)} graphs, {disconnected} disconnected, {elapsed:.2f} s")
    assert disconnected > 20
    assert elapsed < 10.0


# 2 -------------------------------------------------------------------------

TWO_K3 = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]


@pytest.mark.criterion(2, "analytic fixtures exact to 1e-12")
@pytest.mark.parametrize("name, value, expected", [
    ("eff K4", lambda: efficiency(generate("complete", n=4)), 1.0),
    ("eff P3", lambda: efficiency(generate("path", n=3)), 5 / 6),
    ("eff 2K3", lambda: efficiency(Snapshot.from_edges(6, TWO_K3)), 0.4),
    ("L C5", lambda: avg_path_length(generate("ring", n=5, k=2)), 1.5),
    ("C K3", lambda: clustering(generate("complete", n=3)), 1.0),
    ("C tree", lambda: clustering(generate("preferential_attachment", n=40, m=1, seed=3)), 0.0),
    ("C path", lambda: clustering(generate("path", n=9)), 0.0),
    ("Q 2K3 components", lambda: modularity(Snapshot.from_edges(6, TWO_K3), [0, 0, 0, 1, 1, 1]),
     0.5),
    ("Q 2K3 single", lambda: modularity(Snapshot.from_edges(6, TWO_K3), [0] * 6), 0.0),
])
def test_analytic_fixtures(name, value, expected):
    assert abs(value() - expected) <= TIGHT, name


# 3 -------------------------------------------------------------------------

P5_CENTER = 53 / 77  # (77/6 - 4) / (77/6): 77/6 before, 4 after removing the centre


@pytest.mark.criterion(3, "damage fixtures on S4 and P5")
def test_damage_fixtures():
    s4 = generate("star", n=4)
    hub = damage(s4, "node", [0])
    assert hub.value == 1.0 and hub.disconnection == 1.0
    assert damage(s4, "node", [1]).value == pytest.approx(4 / 9, abs=TIGHT)

    p5 = generate("path", n=5)
    w = worst_element(p5, "node")
    assert w.elements == (2,)
    assert abs(w.damage - P5_CENTER) < 1e-9 and round(w.damage, 4) == 0.6883

    # 0-based {1, 3} is the second and fourth node
    pair = worst_subset(p5, "node", 2)
    edges = [tuple(e) for e in p5.edges.tolist()]
    brute = max(oracles.removal_damage(5, edges, "node", c)
                for c in itertools.combinations(range(5), 2))
    assert pair.elements == (1, 3) and pair.damage == brute == 1.0


# 4 -------------------------------------------------------------------------

@pytest.fixture(scope="module")
def grid400(tmp_path_factory):
    d = tmp_path_factory.mktemp("grid400")
    assert main(["gen-fixture", "--model", "spatial", "--n", "400", "--m", "774",
                 "--seed", "42", "--out", str(d)]) == 0
    return str(d)


def _attack(capsys, data, *extra):
    assert main(["attack", "--data", data, "--seed", "42", *extra]) == 0
    return capsys.readouterr().out


@pytest.mark.criterion(4, "byte-identical attack output: repeat runs and 1 vs 8 workers")
def test_determinism(capsys, grid400):
    argv = ("--kind", "both", "--k", "20", "--trials", "10000", "--format", "json")
    a = _attack(capsys, grid400, *argv)
    b = _attack(capsys, grid400, *argv)
    c = _attack(capsys, grid400, *argv, "--workers", "8")
    assert a == b == c
    recs = json.loads(a)
    assert len(recs) == 2 and all(r["trials"] == 10000 for r in recs)
    assert (recs[0]["config"]["seed"], recs[0]["effective_k"]) == (42, 20)


@pytest.mark.slow
@pytest.mark.criterion(4, "full campaign 12 x 10000 trials at N=400, E=774 under 600 s")
def test_full_campaign(capsys, grid400):
    t0 = time.perf_counter()
    out = _attack(capsys, grid400, "--kind", "both", "--k", "1,2,5,10,15,20",
                  "--trials", "10000", "--format", "json")
    elapsed = time.perf_counter() - t0
    recs = json.loads(out)
    print(f"\n[4] 12 x 10000 trials on N=400, E=774: {elapsed:.1f} s")
    assert len(recs) == 12 and {r["kind"] for r in recs} == {"node", "edge"}
    assert all(sum(r["histogram"]["counts"]) == 10000 for r in recs)
    assert elapsed < 600.0


# 5 -------------------------------------------------------------------------

def _all_subset_damage(g, kind):
    """Fixed-N damage of every removal set, keyed by bitmask."""
    count = g.n if kind == "node" else g.m
    base = _baseline(g)[0]
    values = {0: 0.0}
    for k in range(1, count + 1):
        combos = list(itertools.combinations(range(count), k))
        recip = _evaluate(g, kind, np.array(combos, dtype=np.int64)).recip
        for c, r in zip(combos, recip):
            values[sum(1 << i for i in c)] = (base - r) / base
    return values


def _monotone_instances():
    out = []
    for n, edges in oracles.random_instances(400, 8, seed=77, n_min=3):
        if 1 <= len(edges) <= 14:
            out.append((n, edges))
        if len(out) == 60:
            break
    return out


@pytest.mark.criterion(5, "monotonicity over exhaustive subsets, >= 50 graphs with N <= 8")
def test_monotonicity():
    instances = _monotone_instances()
    assert len(instances) >= 50
    for n, edges in instances:
        g = Snapshot.from_edges(n, edges)
        for kind in ("node", "edge"):
            vals = _all_subset_damage(g, kind)
            if kind == "edge":
                assert min(vals.values()) >= 0.0
            for mask, v in vals.items():
                bits = mask
                while bits:
                    low = bits & -bits
                    assert vals[mask ^ low] <= v + TIGHT
                    bits ^= low
            # spot-check the batch path against the brute-force oracle
            mask = max(vals, key=lambda m: (bin(m).count("1") == 2, m))
            sel = [i for i in range(n if kind == "node" else len(edges)) if mask >> i & 1]
            assert vals[mask] == pytest.approx(oracles.removal_damage(n, edges, kind, sel),
                                               abs=TIGHT)


@pytest.mark.criterion(5, "exhaustive worst-subset damage non-decreasing in k")
def test_worst_subset_monotone_in_k():
    for n, edges in _monotone_instances()[:50]:
        g = Snapshot.from_edges(n, edges)
        for kind, count in (("node", n - 1), ("edge", len(edges))):
            prev = 0.0
            for k in range(1, count + 1):
                d = worst_subset(g, kind, k).damage
                assert d >= prev - TIGHT
                prev = d


# 6 -------------------------------------------------------------------------

@pytest.mark.criterion(6, "degree fit: BA -> power_law, ER -> exponential in >= 95% of 20 seeds")
def test_scale_free_discrimination():
    ba = [classify(generate("preferential_attachment", n=2000, m=2, seed=s)).model
          for s in range(20)]
    er = [classify(generate("erdos_renyi", n=2000, p=2.6 / 1999, seed=s)).model
          for s in range(20)]
    hits_ba, hits_er = ba.count("power_law"), er.count("exponential")
    print(f"\n[6] BA power_law {hits_ba}/20, ER exponential {hits_er}/20")
    assert hits_ba >= 19 and hits_er >= 19


@pytest.mark.criterion(6, "exact synthetic curves recovered with sse < 1e-9")
@pytest.mark.parametrize("model, param", [("exponential", 0.3), ("exponential", 1.7),
                                          ("power_law", 1.5), ("power_law", 2.8)])
def test_exact_curves(model, param):
    k = np.arange(1, 16)
    amp = 0.8
    surv = amp * (np.exp(-param * k) if model == "exponential" else k ** -param)
    r = fit(CumulativeDegreeDistribution(k, surv), model)
    assert r.sse < 1e-9
    assert r.rate_or_exponent == pytest.approx(param, abs=1e-9)
    assert r.amplitude == pytest.approx(amp, abs=1e-9)


# 7 -------------------------------------------------------------------------

@pytest.mark.criterion(7, "growing-grid fixture: damage vs L and C, r < -0.5, both kinds")
def test_correlation_sign():
    t = build_timeline(growing_grid(), range(1949, 2020, 10), campaign_scenarios(trials=500, seed=42))
    assert len(t.years) >= 7
    rep = damage_metric_report(t, metrics=("L", "C"), statistic="damage_max")
    print("\n[7] " + ", ".join(f"{k}/{m}: {r:+.3f}" for (k, m), r in sorted(rep.r.items())))
    for kind in ("node", "edge"):
        assert rep.r[(kind, "L")] < -0.5
        assert rep.r[(kind, "C")] < -0.5


# 8 -------------------------------------------------------------------------

@pytest.fixture(scope="module")
def ba_er_pairs():
    out = []
    for s in range(20):
        ba = generate("preferential_attachment", n=500, m=2, seed=s)
        er = generate("erdos_renyi", n=500, m=ba.m, seed=1000 + s)
        out.append((ba, er))
    return out


@pytest.mark.criterion(8, "random removal: mean damage BA <= ER in >= 80% of 20 seeds")
@pytest.mark.parametrize("kind, k", [("node", 1), ("node", 20), ("edge", 1), ("edge", 20)])
def test_random_removal_direction(ba_er_pairs, kind, k):
    agree = 0
    for s, (ba, er) in enumerate(ba_er_pairs):
        sc = RemovalScenario(kind, k, 300, s)
        agree += run_scenario(ba, sc).damage_mean <= run_scenario(er, sc).damage_mean
    print(f"\n[8] random {kind} k={k}: {agree}/20")
    assert agree >= 16


@pytest.mark.criterion(8, "targeted removal: worst single node BA >= ER in >= 80% of 20 seeds")
def test_targeted_removal_direction(ba_er_pairs):
    agree = sum(worst_element(ba, "node").damage >= worst_element(er, "node").damage
                for ba, er in ba_er_pairs)
    print(f"\n[8] worst node: {agree}/20")
    assert agree >= 16

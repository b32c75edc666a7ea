import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridvuln.degree import (CumulativeDegreeDistribution, _design, classify,
                             cumulative_distribution, fit)
from gridvuln.errors import FitError
from gridvuln.graph import Snapshot, generate


def test_star_survival():
    d = cumulative_distribution(generate("star", n=4))
    assert d.k.tolist() == [1, 2, 3]
    assert d.survival.tolist() == [1.0, 0.25, 0.25]


def test_complete_single_point():
    d = cumulative_distribution(generate("complete", n=4))
    assert d.k.tolist() == [3] and d.survival.tolist() == [1.0]


def test_path_survival():
    d = cumulative_distribution(generate("path", n=3))
    assert d.k.tolist() == [1, 2]
    assert d.survival == pytest.approx([1.0, 1 / 3])


def test_isolated_nodes_excluded(caplog):
    g = Snapshot.from_edges(5, [(0, 1), (1, 2)])
    caplog.set_level("INFO")
    d = cumulative_distribution(g)
    assert d.survival == pytest.approx([1.0, 1 / 3])
    assert "2 isolated" in caplog.text


def test_degenerate_graph():
    with pytest.raises(FitError):
        cumulative_distribution(Snapshot.from_edges(3, []))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.floats(0.05, 0.9), st.integers(0, 10_000))
def test_survival_non_increasing(n, p, seed):
    g = generate("erdos_renyi", n=n, p=p, seed=seed)
    if g.m == 0:
        return
    d = cumulative_distribution(g)
    assert d.survival[0] == 1.0
    assert np.all(np.diff(d.survival) <= 0) and np.all(d.survival > 0)


def test_exact_exponential_recovery():
    k = np.arange(1, 11)
    r = fit(CumulativeDegreeDistribution(k, np.exp(-k / 2)), "exponential")
    assert r.rate_or_exponent == pytest.approx(0.5, abs=1e-9)
    assert r.amplitude == pytest.approx(1.0, abs=1e-9)
    assert r.sse < 1e-9 and r.r_squared == pytest.approx(1.0)


def test_exact_power_law_recovery():
    k = np.arange(1, 11)
    r = fit(CumulativeDegreeDistribution(k, k ** -2.0), "power_law")
    assert r.rate_or_exponent == pytest.approx(2.0, abs=1e-9)
    assert r.sse < 1e-9


def test_fit_needs_two_points():
    with pytest.raises(FitError):
        fit(CumulativeDegreeDistribution(np.array([3]), np.array([1.0])), "exponential")


def test_low_confidence_flag():
    r = fit(CumulativeDegreeDistribution(np.array([1, 2]), np.array([1.0, 0.5])), "power_law")
    assert r.low_confidence


@pytest.mark.parametrize("model", ["exponential", "power_law"])
def test_normal_equations_hold(model):
    for seed in range(10):
        d = cumulative_distribution(generate("preferential_attachment", n=300, m=2, seed=seed))
        r = fit(d, model)
        X = _design(model, d.k)
        coef = np.array([np.log(r.amplitude), -r.rate_or_exponent])
        resid = np.log(d.survival) - X @ coef
        assert np.abs(X.T @ resid).max() < 1e-9
        assert r.sse >= 0 and r.r_squared <= 1


def test_preferential_attachment_is_power_law():
    wins = sum(classify(generate("preferential_attachment", n=2000, m=2, seed=s)).model
               == "power_law" for s in range(20))
    assert wins >= 19


def test_erdos_renyi_is_exponential():
    wins = sum(classify(generate("erdos_renyi", n=2000, p=2.6 / 1999, seed=s)).model
               == "exponential" for s in range(20))
    assert wins >= 19


def test_ring_inconclusive():
    c = classify(generate("ring", n=30, k=4))
    assert c.model == "inconclusive" and c.exponential is None


def test_classify_relabel_invariant():
    g = generate("preferential_attachment", n=500, m=2, seed=4)
    perm = np.random.default_rng(0).permutation(g.n)
    h = Snapshot.from_edges(g.n, perm[g.edges])
    a, b = classify(g), classify(h)
    assert a.model == b.model
    assert a.power_law.r_squared == b.power_law.r_squared

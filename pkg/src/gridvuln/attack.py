"""Simultaneous node/edge removal and the efficiency-drop damage measure.

Damage of a removal set is ``(eff0 - eff_after) / eff0``. By default the
post-removal efficiency keeps the original ``N(N-1)`` denominator
(``normalization="fixed"``), which keeps damage in ``[0, 1]`` and monotone in
the removal set. ``normalization="shrunk"`` divides by the surviving node
count instead.

Monte Carlo trial ``t`` of a scenario draws its subset from a generator
seeded with ``(seed, t)``, so results do not depend on how trials are split
across worker threads.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse.csgraph import reverse_cuthill_mckee

from . import _kernels
from .errors import BudgetExceededError, GraphError, InfeasibleScenarioError
from .graph import Snapshot

__all__ = [
    "RemovalScenario",
    "DamageDistribution",
    "Damage",
    "WorstResult",
    "remove",
    "damage",
    "effective_k",
    "run_scenario",
    "worst_element",
    "worst_subset",
    "summary_table",
    "CAMPAIGN_K_VALUES",
    "DEFAULT_BIN_WIDTH",
    "DEFAULT_BUDGET",
]

log = logging.getLogger(__name__)

CAMPAIGN_K_VALUES = (1, 2, 5, 10, 15, 20)
DEFAULT_BIN_WIDTH = 0.0099
DEFAULT_BUDGET = 2_000_000
_KINDS = {"node": _kernels.KIND_NODE, "edge": _kernels.KIND_EDGE}
_TIE = 1e-12


def _kind(kind):
    try:
        return _KINDS[kind]
    except KeyError:
        raise ValueError(f"kind must be 'node' or 'edge', got {kind!r}") from None


def _check_targets(g, kind, targets):
    count = g.n if kind == "node" else g.m
    t = np.asarray(targets, dtype=np.int64).ravel()
    if len(np.unique(t)) != len(t):
        raise GraphError(f"duplicate {kind} in removal targets")
    if len(t) and (t.min() < 0 or t.max() >= count):
        raise GraphError(f"{kind} target out of range [0, {count})")
    return t


def remove(g, kind, targets):
    """Copy of ``g`` without the given nodes (and their edges) or edges.

    Surviving nodes are renumbered densely; ``result.origin`` maps each back
    to its index in ``g``.
    """
    _kind(kind)
    t = _check_targets(g, kind, targets)
    if kind == "edge":
        keep = np.ones(g.m, dtype=bool)
        keep[t] = False
        return Snapshot.from_edges(g.n, g.edges[keep], ids=g.ids,
                                   edge_ids=[g.edge_ids[e] for e in np.flatnonzero(keep)],
                                   year=g.year, origin=g.origin)
    alive = np.ones(g.n, dtype=bool)
    alive[t] = False
    keep_nodes = np.flatnonzero(alive)
    remap = -np.ones(g.n, dtype=np.int64)
    remap[keep_nodes] = np.arange(len(keep_nodes))
    keep = alive[g.edges[:, 0]] & alive[g.edges[:, 1]] if g.m else np.zeros(0, dtype=bool)
    return Snapshot.from_edges(len(keep_nodes), remap[g.edges[keep]],
                               ids=[g.ids[i] for i in keep_nodes],
                               edge_ids=[g.edge_ids[e] for e in np.flatnonzero(keep)],
                               year=g.year, origin=g.origin[keep_nodes])


class _Batch(NamedTuple):
    recip: np.ndarray
    alive: np.ndarray
    gcc_edges: np.ndarray
    lost_edges: np.ndarray


def _source_order(g):
    # neighbouring sources share a BFS block; only speed depends on this
    if g.m == 0:
        return np.arange(g.n, dtype=np.int64)
    return reverse_cuthill_mckee(g.to_csr(), symmetric_mode=True).astype(np.int64)


def _evaluate(g, kind, targets, workers=1):
    targets = np.ascontiguousarray(targets, dtype=np.int64)
    rows = targets.shape[0]
    out = _Batch(np.empty(rows), np.empty(rows, np.int64), np.empty(rows, np.int64),
                 np.empty(rows, np.int64))
    edges = g.edges if g.m else np.zeros((0, 2), dtype=np.int64)
    args = (g.indptr, g.indices, g.edge_of, edges, _source_order(g), targets, _kind(kind))

    def job(lo, hi):
        _kernels.evaluate_batch(*args, lo, hi, *out)

    workers = max(1, min(int(workers), rows))
    if workers == 1:
        job(0, rows)
    else:
        bounds = np.linspace(0, rows, workers + 1).astype(int)
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(job, bounds[:-1], bounds[1:]))
    return out


def _baseline(g):
    b = _evaluate(g, "node", np.zeros((1, 0), dtype=np.int64))
    return float(b.recip[0]), int(b.gcc_edges[0])


def _damage_values(g, base_recip, batch, normalization):
    if normalization == "fixed":
        after = batch.recip
    elif normalization == "shrunk":
        pairs = batch.alive * (batch.alive - 1.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            after = np.where(pairs > 0, batch.recip / pairs, 0.0) * (g.n * (g.n - 1.0))
    else:
        raise ValueError(f"normalization must be 'fixed' or 'shrunk', got {normalization!r}")
    return (base_recip - after) / base_recip


def _require_efficiency(g):
    base, _ = _baseline(g) if g.n >= 2 else (0.0, 0)
    if base <= 0.0:
        raise InfeasibleScenarioError("initial efficiency is zero; damage is undefined")
    return base


class Damage(NamedTuple):
    value: float
    disconnection: float
    incident: float


def damage(g, kind, targets, normalization="fixed"):
    """Relative efficiency drop caused by removing ``targets`` at once.

    Returns
    -------
    Damage
        ``value`` is the efficiency drop over initial efficiency.
        ``disconnection`` is the share of original edges outside the largest
        surviving component; ``incident`` counts only edges removed directly
        or attached to removed nodes.
    """
    t = _check_targets(g, kind, targets)
    base = _require_efficiency(g)
    b = _evaluate(g, kind, t.reshape(1, -1))
    value = float(_damage_values(g, base, b, normalization)[0])
    return Damage(value, (g.m - int(b.gcc_edges[0])) / g.m, int(b.lost_edges[0]) / g.m)


def effective_k(g, kind, k):
    """Cap ``k`` at ``N - 1`` nodes or ``E`` edges."""
    _kind(kind)
    if k < 1:
        raise InfeasibleScenarioError(f"k must be at least 1, got {k}")
    cap = g.n - 1 if kind == "node" else g.m
    if cap < 1:
        raise InfeasibleScenarioError(f"graph has no removable {kind}s (N={g.n}, E={g.m})")
    if k > cap:
        log.info("capping k=%d to %d %ss (year %s)", k, cap, kind, g.year)
    return min(k, cap)


@dataclass(frozen=True)
class RemovalScenario:
    kind: str
    k: int
    trials: int = 10_000
    seed: int = 0
    bin_width: float = DEFAULT_BIN_WIDTH

    def __post_init__(self):
        _kind(self.kind)
        if self.trials < 1:
            raise InfeasibleScenarioError(f"trials must be at least 1, got {self.trials}")
        if not self.bin_width > 0:
            raise InfeasibleScenarioError(f"bin_width must be positive, got {self.bin_width}")
        if self.seed < 0:
            raise InfeasibleScenarioError("seed must be non-negative")


@dataclass(frozen=True)
class DamageDistribution:
    scenario: RemovalScenario
    year: object
    effective_k: int
    damage_max: float
    damage_mode: float
    damage_mean: float
    histogram: tuple
    disconnection_max: float
    disconnection_mean: float
    normalization: str = "fixed"
    disconnection: str = "gcc"

    def to_dict(self):
        s = self.scenario
        return {
            "year": self.year,
            "kind": s.kind,
            "k": s.k,
            "effective_k": self.effective_k,
            "trials": s.trials,
            "seed": s.seed,
            "damage_max": self.damage_max,
            "damage_mode": self.damage_mode,
            "damage_mean": self.damage_mean,
            "disconnection_max": self.disconnection_max,
            "disconnection_mean": self.disconnection_mean,
            "histogram": {"bin_width": s.bin_width, "counts": list(self.histogram)},
        }


def _draws(seed, trials, k):
    out = np.empty((trials, k))
    for t in range(trials):
        out[t] = np.random.default_rng([seed, t]).random(k)
    return out


def _histogram(values, width):
    nbins = int(math.ceil(1.0 / width - 1e-9))
    idx = np.clip(np.floor(values / width), 0, nbins - 1).astype(np.int64)
    counts = np.bincount(idx, minlength=nbins)
    top = int(np.argmax(counts))
    lo, hi = top * width, min((top + 1) * width, 1.0)
    return counts, (lo + hi) / 2.0


def run_scenario(g, scenario, workers=1, normalization="fixed", disconnection="gcc"):
    """Monte Carlo damage distribution of one removal scenario.

    Parameters
    ----------
    g : Snapshot
    scenario : RemovalScenario
    workers : int
        Threads used for trial evaluation. Results are identical for any
        value.
    normalization : {"fixed", "shrunk"}
    disconnection : {"gcc", "incident"}
        Which edge-loss ratio feeds the ``disconnection_*`` statistics.

    Returns
    -------
    DamageDistribution
        ``damage_mode`` is the centre of the most populated histogram bin,
        clipped to ``damage_max``.
    """
    if disconnection not in ("gcc", "incident"):
        raise ValueError(f"disconnection must be 'gcc' or 'incident', got {disconnection!r}")
    k = effective_k(g, scenario.kind, scenario.k)
    base = _require_efficiency(g)
    count = g.n if scenario.kind == "node" else g.m
    targets = _kernels.sample_subsets(count, _draws(scenario.seed, scenario.trials, k))
    b = _evaluate(g, scenario.kind, targets, workers)
    values = _damage_values(g, base, b, normalization)
    lost = b.lost_edges if disconnection == "incident" else g.m - b.gcc_edges
    ratios = lost / g.m
    counts, mode = _histogram(values, scenario.bin_width)
    dmax = float(values.max())
    return DamageDistribution(
        scenario=scenario,
        year=g.year,
        effective_k=k,
        damage_max=dmax,
        damage_mode=float(min(mode, dmax)),
        damage_mean=float(values.mean()),
        histogram=tuple(int(c) for c in counts),
        disconnection_max=float(ratios.max()),
        disconnection_mean=float(ratios.mean()),
        normalization=normalization,
        disconnection=disconnection,
    )


@dataclass(frozen=True)
class WorstResult:
    kind: str
    elements: tuple
    damage: float
    strategy: str

    def element_ids(self, g):
        names = g.ids if self.kind == "node" else g.edge_ids
        return [names[i] for i in self.elements]


def _argmax_first(values):
    best = values.max()
    return int(np.flatnonzero(values >= best - _TIE)[0])


def worst_element(g, kind, normalization="fixed", workers=1):
    """Single node or edge whose removal causes the largest damage.

    Ties resolve to the smallest index.
    """
    base = _require_efficiency(g)
    count = g.n if kind == "node" else g.m
    if count < 1:
        raise InfeasibleScenarioError(f"graph has no {kind}s")
    b = _evaluate(g, kind, np.arange(count).reshape(-1, 1), workers)
    values = _damage_values(g, base, b, normalization)
    i = _argmax_first(values)
    return WorstResult(kind, (i,), float(values[i]), "exhaustive")


def worst_subset(g, kind, k, strategy="exhaustive", budget=DEFAULT_BUDGET,
                 normalization="fixed", workers=1, chunk=20_000):
    """Most damaging set of ``k`` simultaneous removals.

    ``strategy="exhaustive"`` scans every ``k``-subset in lexicographic order
    and returns the first maximiser; it refuses to run when the number of
    subsets exceeds ``budget``. ``strategy="greedy"`` grows the set one
    element at a time by largest marginal damage.
    """
    base = _require_efficiency(g)
    count = g.n if kind == "node" else g.m
    if not 1 <= k <= count:
        raise InfeasibleScenarioError(f"k={k} outside [1, {count}] for {kind} removal")
    if strategy == "exhaustive":
        total = math.comb(count, k)
        if total > budget:
            raise BudgetExceededError(
                f"exhaustive search over C({count}, {k}) = {total} subsets exceeds budget "
                f"{budget}; use strategy='greedy'"
            )
        best_val, best_set = -np.inf, None
        combos = itertools.combinations(range(count), k)
        while True:
            block = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, chunk)),
                                dtype=np.int64).reshape(-1, k)
            if not len(block):
                break
            values = _damage_values(g, base, _evaluate(g, kind, block, workers), normalization)
            i = _argmax_first(values)
            if values[i] > best_val + _TIE:
                best_val, best_set = float(values[i]), tuple(int(x) for x in block[i])
        return WorstResult(kind, best_set, best_val, "exhaustive")
    if strategy == "greedy":
        chosen = []
        value = 0.0
        for _ in range(k):
            rest = np.setdiff1d(np.arange(count), chosen)
            block = np.column_stack([np.tile(chosen, (len(rest), 1)).astype(np.int64), rest])
            values = _damage_values(g, base, _evaluate(g, kind, block, workers), normalization)
            i = _argmax_first(values)
            chosen.append(int(rest[i]))
            value = float(values[i])
        return WorstResult(kind, tuple(sorted(chosen)), value, "greedy")
    raise ValueError(f"strategy must be 'exhaustive' or 'greedy', got {strategy!r}")


def summary_table(results, statistic="damage_max"):
    """Table rows ``year, value@k..., ratio`` for one statistic.

    ``ratio`` divides the value at the largest k by the value at the
    smallest, the disturbance-size sensitivity used to compare years. Each
    row is a dict keyed by ``year``, ``k<k>`` and ``ratio``.
    """
    by_year = {}
    for r in results:
        by_year.setdefault(r.year, {})[r.scenario.k] = getattr(r, statistic)
    rows = []
    for year in sorted(by_year, key=lambda y: (y is None, y)):
        vals = by_year[year]
        ks = sorted(vals)
        row = {"year": year}
        row.update({f"k{k}": vals[k] for k in ks})
        lo = vals[ks[0]]
        row["ratio"] = vals[ks[-1]] / lo if lo else math.nan
        rows.append(row)
    return rows

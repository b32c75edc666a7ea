"""Year-by-year analysis of a temporal dataset and damage/metric correlations."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .attack import CAMPAIGN_K_VALUES, RemovalScenario, run_scenario, worst_element
from .errors import EmptySnapshotError, GridVulnError
from .griddata import ElementRecord, TemporalDataset, snapshot
from .metrics import METRICS_COLUMNS, compute_metrics

__all__ = [
    "TimelineSeries",
    "CorrelationReport",
    "build_timeline",
    "normalize",
    "correlate",
    "damage_metric_report",
    "campaign_scenarios",
    "growing_grid",
    "timeline_rows",
]

log = logging.getLogger(__name__)

DAMAGE_FIELDS = (("dmg_max", "damage_max"), ("dmg_mode", "damage_mode"),
                 ("dmg_mean", "damage_mean"), ("disc_max", "disconnection_max"),
                 ("disc_mean", "disconnection_mean"))


def campaign_scenarios(trials=10_000, seed=0, ks=CAMPAIGN_K_VALUES, kinds=("node", "edge"), **kw):
    """The twelve-scenario grid: each kind crossed with each k."""
    return [RemovalScenario(kind, k, trials, seed, **kw) for kind in kinds for k in ks]


@dataclass(frozen=True)
class TimelineSeries:
    years: tuple
    metrics: dict
    damage: dict = field(default_factory=dict)
    worst: dict = field(default_factory=dict)

    def metric_series(self, name):
        return np.array([getattr(self.metrics[y], name) for y in self.years], dtype=float)


def build_timeline(dataset, years, scenarios=(), workers=1, normalization="fixed",
                   disconnection="gcc", worst=False, seed=0, sigma_baseline="analytic"):
    """Metrics and scenario results for every requested year.

    Years whose snapshot is empty are skipped with a warning. Errors from a
    single year are re-raised with the year attached.
    """
    done, metrics, damage, worst_out = [], {}, {}, {}
    for year in sorted(set(years)):
        try:
            g = snapshot(dataset, year)
        except EmptySnapshotError as exc:
            log.warning("skipping %s: %s", year, exc)
            continue
        try:
            metrics[year] = compute_metrics(g, seed=seed, sigma_baseline=sigma_baseline)
            damage[year] = [run_scenario(g, s, workers=workers, normalization=normalization,
                                         disconnection=disconnection) for s in scenarios]
            if worst:
                worst_out[year] = {kind: worst_element(g, kind, normalization, workers)
                                   for kind in ("node", "edge")}
        except GridVulnError as exc:
            raise type(exc)(f"year {year}: {exc}") from exc
        done.append(year)
    return TimelineSeries(tuple(done), metrics, damage, worst_out)


def timeline_rows(t):
    """Header and rows joining metrics with per-scenario damage summaries."""
    header = list(METRICS_COLUMNS)
    keys = []
    if t.years:
        for d in t.damage.get(t.years[0], []):
            keys.append((d.scenario.kind, d.scenario.k))
            header += [f"{short}_{d.scenario.kind}_k{d.scenario.k}" for short, _ in DAMAGE_FIELDS]
    rows = []
    for y in t.years:
        row = t.metrics[y].csv_row()
        by_key = {(d.scenario.kind, d.scenario.k): d for d in t.damage.get(y, [])}
        for key in keys:
            d = by_key[key]
            row += [f"{getattr(d, attr):.6f}" for _, attr in DAMAGE_FIELDS]
        rows.append(row)
    return header, rows


def normalize(values):
    """Min-max scaling to ``[0, 1]``."""
    x = np.asarray(values, dtype=float)
    lo, hi = x.min(), x.max()
    if not hi > lo:
        raise ValueError("cannot min-max normalise a constant series")
    return (x - lo) / (hi - lo)


def correlate(x, y):
    """Pearson product-moment correlation of two equal-length series."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise ValueError("correlation needs at least 3 points")
    dx, dy = x - x.mean(), y - y.mean()
    sx, sy = math.sqrt(dx @ dx), math.sqrt(dy @ dy)
    if sx == 0 or sy == 0:
        raise ValueError("correlation undefined for a constant series")
    return float(np.clip((dx @ dy) / (sx * sy), -1.0, 1.0))


@dataclass(frozen=True)
class CorrelationReport:
    r: dict  # (kind, metric) -> Pearson r
    damage: dict  # kind -> normalised aggregated damage series
    metrics: dict  # metric -> normalised series
    years: tuple
    statistic: str
    order: str
    source: str

    def to_dict(self):
        return {
            "years": list(self.years),
            "statistic": self.statistic,
            "order": self.order,
            "source": self.source,
            "correlations": [{"kind": k, "metric": m, "r": r} for (k, m), r in sorted(self.r.items())],
            "damage": {k: list(v) for k, v in self.damage.items()},
            "metrics": {k: list(v) for k, v in self.metrics.items()},
        }


def _aggregate(series_by_k, order):
    if order == "average_first":
        return normalize(np.mean(series_by_k, axis=0))
    if order != "normalize_first":
        raise ValueError(f"order must be 'normalize_first' or 'average_first', got {order!r}")
    scaled = []
    for s in series_by_k:
        try:
            scaled.append(normalize(s))
        except ValueError:
            log.warning("constant damage series skipped before averaging")
    if not scaled:
        raise ValueError("every damage series is constant")
    return np.mean(scaled, axis=0)


def damage_metric_report(t, metrics=("L", "C", "sigma"), statistic="damage_max",
                         order="normalize_first", source="monte_carlo"):
    """Correlate normalised per-year damage with normalised network metrics.

    With ``source="monte_carlo"`` the per-year damage of each kind is the
    chosen statistic averaged over scenario sizes. ``source="exhaustive"``
    uses the worst single-element damage (requires ``build_timeline(...,
    worst=True)``).
    """
    years = t.years
    if len(years) < 3:
        raise ValueError(f"need at least 3 years, got {len(years)}")
    kinds = sorted({d.scenario.kind for y in years for d in t.damage.get(y, [])})
    dmg = {}
    if source == "monte_carlo":
        for kind in kinds:
            ks = sorted({d.scenario.k for d in t.damage[years[0]] if d.scenario.kind == kind})
            series = []
            for k in ks:
                series.append([next(getattr(d, statistic) for d in t.damage[y]
                                    if d.scenario.kind == kind and d.scenario.k == k)
                               for y in years])
            dmg[kind] = _aggregate(np.array(series), order)
    elif source == "exhaustive":
        if not t.worst:
            raise ValueError("exhaustive source needs a timeline built with worst=True")
        for kind in ("node", "edge"):
            dmg[kind] = normalize([t.worst[y][kind].damage for y in years])
    else:
        raise ValueError(f"source must be 'monte_carlo' or 'exhaustive', got {source!r}")
    norm_metrics = {m: normalize(t.metric_series(m)) for m in metrics}
    r = {(kind, m): correlate(dmg[kind], norm_metrics[m]) for kind in dmg for m in norm_metrics}
    return CorrelationReport(r, dmg, norm_metrics, tuple(years), statistic, order, source)


def growing_grid(start=1949, end=2019, initial=12, per_year=5, second_link=0.35,
                 triangles=(1, 3), seed=7):
    """Synthetic temporal grid that grows every year.

    New substations appear at random points in the unit square and connect
    to the nearest active substation; with probability ``second_link`` also
    to the second nearest. Every ``triangles[1]``-th year, ``triangles[0]``
    plus one per elapsed decade short links close triangles between two
    neighbours of an existing node, so clustering builds up over time.
    """
    rng = np.random.default_rng(seed)
    pts = {}
    nodes, edges = [], []
    adj = {}

    def add_node(year):
        nid = f"n{len(nodes):04d}"
        pts[nid] = rng.random(2)
        adj[nid] = set()
        nodes.append(ElementRecord(id=nid, kind="node", name=f"substation {len(nodes)}",
                                   commissioned=year))
        return nid

    def add_edge(a, b, year):
        adj[a].add(b)
        adj[b].add(a)
        edges.append(ElementRecord(id=f"l{len(edges):04d}", kind="edge", endpoints=(a, b),
                                   commissioned=year))

    def nearest(nid, exclude):
        cands = [o for o in pts if o != nid and o not in exclude]
        d = [float(np.sum((pts[o] - pts[nid]) ** 2)) for o in cands]
        return [cands[i] for i in np.argsort(d, kind="stable")]

    first = add_node(start)
    for _ in range(initial - 1):
        nid = add_node(start)
        add_edge(nid, nearest(nid, set())[0] if len(pts) > 2 else first, start)

    for year in range(start + 1, end + 1):
        for _ in range(per_year):
            nid = add_node(year)
            near = nearest(nid, set())
            add_edge(nid, near[0], year)
            if rng.random() < second_link and len(near) > 1:
                add_edge(nid, near[1], year)
        if (year - start) % triangles[1] == 0:
            for _ in range(triangles[0] + (year - start) // 10):
                hubs = [v for v in sorted(adj) if len(adj[v]) >= 2]
                best = None
                for v in hubs:
                    nb = sorted(adj[v])
                    for i in range(len(nb)):
                        for j in range(i + 1, len(nb)):
                            a, b = nb[i], nb[j]
                            if b in adj[a]:
                                continue
                            d = float(np.sum((pts[a] - pts[b]) ** 2))
                            if best is None or d < best[0]:
                                best = (d, a, b)
                if best is None:
                    break
                add_edge(best[1], best[2], year)
    return TemporalDataset(nodes=tuple(sorted(nodes, key=lambda r: r.id)),
                           edges=tuple(sorted(edges, key=lambda r: r.id)))

"""Command-line front end.

Every output embeds the run configuration (tool version, seed, convention
flags) so a file is enough to reproduce itself. Exit codes: 0 ok, 1 input
error, 2 invalid configuration, 3 undefined metric, 4 infeasible scenario or
exhaustive budget exceeded.
"""

import argparse
import csv
import io
import json
import logging
import os
import sys

from . import __version__
from .attack import (DEFAULT_BIN_WIDTH, DEFAULT_BUDGET, CAMPAIGN_K_VALUES, RemovalScenario,
                     run_scenario, summary_table, worst_subset)
from .degree import classify
from .errors import (FitError, GraphError, GridDataError, InfeasibleScenarioError,
                     UndefinedMetricError)
from .graph import generate
from .griddata import ElementRecord, TemporalDataset, load_dataset, snapshot, write_dataset
from .metrics import METRICS_COLUMNS, compute_metrics
from .timeline import build_timeline, damage_metric_report, growing_grid, timeline_rows

log = logging.getLogger("gridvuln")

EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_METRIC, EXIT_INFEASIBLE = 0, 1, 2, 3, 4


class ConfigError(Exception):
    pass


def parse_years(spec):
    """``start:end:step`` (end inclusive), a comma list, or a single year."""
    try:
        if ":" in spec:
            parts = [int(p) for p in spec.split(":")]
            if len(parts) == 2:
                parts.append(1)
            start, end, step = parts
            if step < 1 or end < start:
                raise ValueError
            return list(range(start, end + 1, step))
        return sorted({int(p) for p in spec.split(",") if p.strip()})
    except ValueError:
        raise ConfigError(f"invalid year selection {spec!r}") from None


def parse_ints(spec):
    try:
        out = [int(p) for p in spec.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"invalid integer list {spec!r}") from None
    if not out:
        raise ConfigError("empty list")
    return out


def _kinds(kind):
    return ["node", "edge"] if kind == "both" else [kind]


def _config(args):
    cfg = {"tool": f"gridvuln {__version__}", "command": args.command}
    for key, value in sorted(vars(args).items()):
        if key in ("command", "func", "out", "format", "verbose", "workers"):
            continue
        cfg[key] = value
    return cfg


def _emit(args, header, rows, records):
    """Write CSV (config as ``#`` comment) or a JSON array of records."""
    cfg = _config(args)
    if args.format == "json":
        text = json.dumps([dict(r, config=cfg) for r in records], indent=1, sort_keys=False,
                          ensure_ascii=False) + "\n"
    else:
        buf = io.StringIO()
        buf.write("# " + json.dumps(cfg, sort_keys=True, ensure_ascii=False) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"{args.command}.{args.format}")
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _years(args, dataset):
    if getattr(args, "years", None):
        return parse_years(args.years)
    if getattr(args, "year", None) is not None:
        return [args.year]
    return [dataset.year_range[1]]


def _scenarios(args):
    if args.seed is None:
        raise ConfigError("--seed is required for attack runs")
    ks = parse_ints(args.k)
    try:
        return [RemovalScenario(kind, k, args.trials, args.seed, args.bin_width)
                for kind in _kinds(args.kind) for k in ks]
    except InfeasibleScenarioError as exc:
        raise ConfigError(str(exc)) from None


def _f(x):
    return f"{x:.6f}"


def cmd_snapshot(args):
    ds = load_dataset(args.data)
    g = snapshot(ds, _years(args, ds)[0])
    doc = json.loads(g.to_json())
    rows = [list(e) for e in doc["edges"]]
    _emit(args, ["from_id", "to_id"], rows, [doc])


def cmd_metrics(args):
    ds = load_dataset(args.data)
    if args.seed is None:
        args.seed = 0  # community detection seed, recorded in the output config
    reports = []
    for y in _years(args, ds):
        try:
            reports.append(compute_metrics(snapshot(ds, y), seed=args.seed,
                                           modularity_normalization=args.modularity,
                                           sigma_baseline=args.sigma_baseline))
        except UndefinedMetricError as exc:
            raise UndefinedMetricError(f"year {y}: {exc}") from exc
    _emit(args, METRICS_COLUMNS, [r.csv_row() for r in reports], [r.as_dict() for r in reports])


def cmd_fit(args):
    ds = load_dataset(args.data)
    header = ["year", "model", "amplitude", "rate_or_exponent", "sse", "r_squared", "classification"]
    rows, records = [], []
    for y in _years(args, ds):
        try:
            c = classify(snapshot(ds, y))
        except FitError as exc:
            raise UndefinedMetricError(f"year {y}: {exc}") from exc
        for res in (c.exponential, c.power_law):
            if res is None:
                continue
            rows.append([y, res.model, _f(res.amplitude), _f(res.rate_or_exponent), _f(res.sse),
                         _f(res.r_squared), c.model])
            records.append({"year": y, "model": res.model, "amplitude": res.amplitude,
                            "rate_or_exponent": res.rate_or_exponent, "sse": res.sse,
                            "r_squared": res.r_squared, "low_confidence": res.low_confidence,
                            "classification": c.model})
        if c.exponential is None:
            records.append({"year": y, "classification": c.model})
    _emit(args, header, rows, records)


ATTACK_COLUMNS = ("year", "kind", "k", "effective_k", "trials", "seed", "damage_max",
                  "damage_mode", "damage_mean", "disconnection_max", "disconnection_mean")


def cmd_attack(args):
    ds = load_dataset(args.data)
    scenarios = _scenarios(args)
    results = []
    for y in _years(args, ds):
        g = snapshot(ds, y)
        for s in scenarios:
            d = run_scenario(g, s, workers=args.workers, normalization=args.normalization,
                             disconnection=args.disconnection)
            if d.effective_k != s.k:
                log.warning("year %s: k=%d capped to effective_k=%d %ss", y, s.k, d.effective_k,
                            s.kind)
            results.append(d)
    results.sort(key=lambda d: (d.year, d.scenario.kind, d.scenario.k))
    if args.table:
        stats = ("damage_max", "damage_mode", "disconnection_max", "disconnection_mean")
        ks = sorted({d.scenario.k for d in results})
        header = ["kind", "statistic", "year"] + [f"k{k}" for k in ks] + ["ratio"]
        rows, records = [], []
        for kind in _kinds(args.kind):
            for stat in stats:
                for row in summary_table([d for d in results if d.scenario.kind == kind], stat):
                    rec = {"kind": kind, "statistic": stat, **row}
                    records.append(rec)
                    rows.append([kind, stat, row["year"]] + [_f(row[f"k{k}"]) for k in ks]
                                + [_f(row["ratio"])])
        _emit(args, header, rows, records)
        return
    records = [d.to_dict() for d in results]
    rows = [[r[c] if c in ("year", "kind", "k", "effective_k", "trials", "seed") else _f(r[c])
             for c in ATTACK_COLUMNS] for r in records]
    _emit(args, ATTACK_COLUMNS, rows, records)


def cmd_worst(args):
    ds = load_dataset(args.data)
    header = ["year", "kind", "k", "strategy", "elements", "damage"]
    rows, records = [], []
    for y in _years(args, ds):
        g = snapshot(ds, y)
        for kind in _kinds(args.kind):
            res = worst_subset(g, kind, args.k, strategy=args.strategy, budget=args.budget,
                               normalization=args.normalization, workers=args.workers)
            ids = res.element_ids(g)
            rec = {"year": y, "kind": kind, "k": args.k, "strategy": res.strategy,
                   "elements": ids, "damage": res.damage}
            if kind == "edge":
                rec["endpoints"] = [[g.ids[u] for u in g.edges[e]] for e in res.elements]
            records.append(rec)
            rows.append([y, kind, args.k, res.strategy, ";".join(ids), _f(res.damage)])
    _emit(args, header, rows, records)


def _timeline(args, ds, worst=False):
    scenarios = _scenarios(args) if args.k else []
    if args.seed is None:
        args.seed = 0
    return build_timeline(ds, _years(args, ds), scenarios, workers=args.workers,
                          normalization=args.normalization, disconnection=args.disconnection,
                          worst=worst, seed=args.seed)


def cmd_timeline(args):
    ds = load_dataset(args.data)
    t = _timeline(args, ds)
    header, rows = timeline_rows(t)
    records = [dict(zip(header, row)) for row in rows]
    for rec in records:
        for key, value in rec.items():
            if key not in ("year", "n", "m", "diameter"):
                rec[key] = float(value)
            else:
                rec[key] = int(value)
    _emit(args, header, rows, records)


def cmd_correlate(args):
    ds = load_dataset(args.data)
    if not args.k and args.source == "monte_carlo":
        raise ConfigError("correlate with --source monte_carlo needs --k")
    t = _timeline(args, ds, worst=args.source == "exhaustive")
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    bad = set(metrics) - {"L", "C", "sigma", "eff", "Q", "avg_degree", "diameter"}
    if bad:
        raise ConfigError(f"unknown metrics {sorted(bad)}")
    try:
        rep = damage_metric_report(t, metrics, order=args.order, source=args.source)
    except ValueError as exc:
        raise UndefinedMetricError(str(exc)) from exc
    doc = rep.to_dict()
    rows = [[c["kind"], c["metric"], _f(c["r"])] for c in doc["correlations"]]
    _emit(args, ["kind", "metric", "r"], rows, [doc])


def cmd_gen_fixture(args):
    if not args.out:
        raise ConfigError("gen-fixture needs --out")
    if args.model == "growing":
        extra = {} if args.seed is None else {"seed": args.seed}
        ds = growing_grid(start=args.year, end=args.end, **extra)
    else:
        params = {"n": args.n}
        if args.m is not None:
            params["m"] = args.m
        if args.p is not None:
            params["p"] = args.p
        if args.model == "ring":
            params["k"] = args.m or 2
            params.pop("m", None)
        g = generate(args.model, seed=args.seed, **params)
        width = len(str(max(g.n - 1, 0)))
        name = [f"n{i:0{width}d}" for i in range(g.n)]
        nodes = tuple(ElementRecord(id=name[i], kind="node", name=name[i],
                                    commissioned=args.year) for i in range(g.n))
        ewidth = len(str(max(g.m - 1, 0)))
        edges = tuple(ElementRecord(id=f"l{e:0{ewidth}d}", kind="edge",
                                    endpoints=(name[u], name[v]), commissioned=args.year)
                      for e, (u, v) in enumerate(g.edges.tolist()))
        ds = TemporalDataset(nodes, edges)
    write_dataset(ds, args.out)


def build_parser():
    p = argparse.ArgumentParser(prog="gridvuln", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"gridvuln {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, data=True):
        if data:
            sp.add_argument("--data", required=True, help="directory with nodes.csv and edges.csv")
        sp.add_argument("--out", help="output directory (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("-v", "--verbose", action="store_true")

    def years(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--years", help="start:end:step or comma list")
        g.add_argument("--year", type=int)

    def removal(sp, k_default="1"):
        sp.add_argument("--kind", choices=("node", "edge", "both"), default="node")
        sp.add_argument("--k", default=k_default, help="comma list of removal sizes")
        sp.add_argument("--trials", type=int, default=10_000)
        sp.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
        sp.add_argument("--normalization", choices=("fixed", "shrunk"), default="fixed")
        sp.add_argument("--disconnection", choices=("gcc", "incident"), default="gcc")

    sp = sub.add_parser("snapshot", help="export one year's graph")
    common(sp)
    years(sp)
    sp.set_defaults(func=cmd_snapshot)

    sp = sub.add_parser("metrics", help="network metrics per year")
    common(sp)
    years(sp)
    sp.add_argument("--modularity", choices=("standard", "avg_degree"), default="standard")
    sp.add_argument("--sigma-baseline", choices=("analytic", "ensemble"), default="analytic")
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("fit", help="degree distribution fits")
    common(sp)
    years(sp)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("attack", help="Monte Carlo removal scenarios")
    common(sp)
    years(sp)
    removal(sp, ",".join(map(str, CAMPAIGN_K_VALUES)))
    sp.add_argument("--table", action="store_true", help="year-by-k summary with k_max/k_min ratio")
    sp.set_defaults(func=cmd_attack)

    sp = sub.add_parser("worst", help="most damaging element or subset")
    common(sp)
    years(sp)
    sp.add_argument("--kind", choices=("node", "edge", "both"), default="node")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--strategy", choices=("exhaustive", "greedy"), default="exhaustive")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--normalization", choices=("fixed", "shrunk"), default="fixed")
    sp.set_defaults(func=cmd_worst)

    sp = sub.add_parser("timeline", help="metrics and damage summaries per year")
    common(sp)
    years(sp)
    removal(sp, "")
    sp.set_defaults(func=cmd_timeline)

    sp = sub.add_parser("correlate", help="correlate normalised damage with metrics")
    common(sp)
    years(sp)
    removal(sp, ",".join(map(str, CAMPAIGN_K_VALUES)))
    sp.add_argument("--metrics", default="L,C,sigma")
    sp.add_argument("--order", choices=("normalize_first", "average_first"),
                    default="normalize_first")
    sp.add_argument("--source", choices=("monte_carlo", "exhaustive"), default="monte_carlo")
    sp.set_defaults(func=cmd_correlate)

    sp = sub.add_parser("gen-fixture", help="write a synthetic dataset")
    common(sp, data=False)
    sp.add_argument("--model", default="growing",
                    choices=("growing", "ring", "path", "star", "complete", "erdos_renyi",
                             "preferential_attachment", "spatial"))
    sp.add_argument("--n", type=int, default=10)
    sp.add_argument("--m", type=int, help="edges (spatial, erdos_renyi), links per node "
                    "(preferential_attachment) or neighbours (ring)")
    sp.add_argument("--p", type=float)
    sp.add_argument("--year", type=int, default=1949, help="commissioning / start year")
    sp.add_argument("--end", type=int, default=2019, help="last year of the growing model")
    sp.set_defaults(func=cmd_gen_fixture)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.workers < 1:
        parser.error("--workers must be at least 1")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"gridvuln: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GridDataError, OSError) as exc:
        print(f"gridvuln: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (UndefinedMetricError, FitError) as exc:
        print(f"gridvuln: undefined metric: {exc}", file=sys.stderr)
        return EXIT_METRIC
    except InfeasibleScenarioError as exc:
        print(f"gridvuln: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except GraphError as exc:
        print(f"gridvuln: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""
Vulnerability over time
=======================

Run the removal scenarios on every decade of the growing grid, then correlate
the normalised maximal damage with path length and clustering.
"""

import gridvuln as gv

ds = gv.growing_grid()
t = gv.build_timeline(ds, range(1949, 2020, 10), gv.campaign_scenarios(trials=300, seed=42))

for year in t.years:
    m = t.metrics[year]
    worst = max(d.damage_max for d in t.damage[year] if d.scenario.kind == "node")
    print(year, m.n, m.m, round(m.L, 2), round(m.C, 3), round(worst, 3))

rep = gv.damage_metric_report(t, metrics=("L", "C", "sigma"))
for (kind, metric), r in sorted(rep.r.items()):
    print(f"{kind:4s} vs {metric:5s}  r = {r:+.3f}")

"""
Yearly snapshots and network metrics
====================================

A grid is described by commissioning records. Each year gives a graph of the
elements in service; we follow how it grows and how its structure changes.
"""

import gridvuln as gv

# the synthetic growing grid shipped with the package: 1949..2019
ds = gv.growing_grid()
print(ds.year_range, len(ds.nodes), "substations", len(ds.edges), "lines")

# one snapshot per decade
for year in range(1949, 2020, 10):
    g = gv.snapshot(ds, year)
    r = gv.compute_metrics(g, seed=0)
    print(f"{year}  N={r.n:3d}  E={r.m:3d}  <k>={r.avg_degree:.2f}  "
          f"L={r.L:.2f}  C={r.C:.3f}  Q={r.Q:.3f}  sigma={r.sigma:.2f}  eff={r.eff:.3f}")

# efficiency on small textbook graphs: complete graphs are 1, paths less
print(gv.efficiency(gv.generate("complete", n=4)), gv.efficiency(gv.generate("path", n=3)))

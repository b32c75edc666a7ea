"""
Exponential or power-law degree tails
=====================================

Fit the cumulative degree distribution P(K >= k) with both models in log
space and keep the better one.
"""

import gridvuln as gv

graphs = {
    "preferential attachment": gv.generate("preferential_attachment", n=2000, m=2, seed=1),
    "random G(n, p)": gv.generate("erdos_renyi", n=2000, p=2.6 / 1999, seed=1),
    "grid, 2019": gv.snapshot(gv.growing_grid(), 2019),
}

for name, g in graphs.items():
    c = gv.classify(g)
    print(f"{name:25s} -> {c.model:12s} "
          f"r2 exp={c.exponential.r_squared:.3f}  r2 pow={c.power_law.r_squared:.3f}")

# the survival curve itself
d = gv.cumulative_distribution(graphs["grid, 2019"])
for k, p in zip(d.k, d.survival):
    print(k, round(float(p), 4))

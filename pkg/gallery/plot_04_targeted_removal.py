"""
Worst-case removals
===================

The single most damaging element is found by scanning all candidates. For
small k the best set is found exhaustively; a greedy heuristic covers larger
cases but can miss the optimum.
"""

import gridvuln as gv

g = gv.snapshot(gv.growing_grid(), 1979)
for kind in ("node", "edge"):
    w = gv.worst_element(g, kind)
    print(kind, w.element_ids(g), round(w.damage, 4))

# on a 5-node path the greedy choice (the centre first) is not optimal
p5 = gv.generate("path", n=5)
print("exhaustive", gv.worst_subset(p5, "node", 2))
print("greedy    ", gv.worst_subset(p5, "node", 2, strategy="greedy"))

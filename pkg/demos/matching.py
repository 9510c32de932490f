"""
Bipartite matching through the LP relaxation
=============================================

n agents are assigned to m >= n tasks.  The relaxation adds one
cheap slack per task column so the constraints stay square-free; the
iterate concentrates onto the optimal assignment as the budget grows.
"""

import numpy as np

from physlp import SolverConfig, solve
from physlp.oracles import hungarian
from physlp.problems import (MatchingInstance, build_matching_lp,
                             decode_matching, split_matching_vars)

rng = np.random.default_rng(42)
n, m = 3, 6
C = rng.uniform(size=(n, m))

lp = build_matching_lp(MatchingInstance(C))
print(f"cost matrix {n}x{m} -> LP with {lp.n} variables, {lp.m} rows")

ref = hungarian(C)
print("Hungarian:", ref.map, "cost", round(ref.cost, 4))

# more iterations, tighter concentration on the 0/1 vertex
off_target = np.ones((n, m), dtype=bool)
off_target[np.arange(n), ref.map] = False
for iters in (10, 50, 200):
    res = solve(lp, SolverConfig(max_iters=iters), early_stop=False)
    X, s = split_matching_vars(res.x, n, m)
    decoded = decode_matching(res.x, n, m, C=C)
    agree = "==" if np.array_equal(decoded.map, ref.map) else "!="
    print(f"iters={iters:4d}  decoded {decoded.map} {agree} Hungarian   "
          f"stray mass {X[off_target].max():.3f}  "
          f"objective {res.objective:.4f}")

# the relaxed optimum costs the assignment plus one slack per
# unmatched column
res = solve(lp, SolverConfig(max_iters=200))
gamma = lp.c[-1]
print("\nLP objective      ", round(res.objective, 4))
print("assignment + slack", round(ref.cost + gamma * (m - n), 4))

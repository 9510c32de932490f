"""
Differentiating through the solver
===================================

The forward loop is recorded on a tape; backward() replays it in
reverse, yielding exact gradients of any loss of the final iterate
with respect to (c, A, b).  A small gradient-descent loop then tunes a
cost matrix until the solver's assignment hits a chosen target.
"""

import numpy as np

from physlp import SolverConfig, backward, finite_diff_grad, solve_with_tape
from physlp.problems import (MatchingInstance, build_matching_lp,
                             decode_matching, matching_cost_gradient,
                             split_matching_vars)

# ---- gradients agree with finite differences -------------------------

rng = np.random.default_rng(1)
C = rng.uniform(size=(2, 3))
lp = build_matching_lp(MatchingInstance(C))
cfg = SolverConfig(max_iters=10)
x0 = np.ones(lp.n)

res, tape = solve_with_tape(lp, cfg, x0=x0)
w = rng.normal(size=lp.n)
grads = backward(tape, w)                       # reverse mode
fd = finite_diff_grad(lp, cfg, lambda x: float(w @ x), x0=x0)

err = np.abs(grads.grad_c - fd.grad_c).max() / np.abs(fd.grad_c).max()
print(f"loss w.x over {len(tape)} unrolled steps")
print(f"max relative gradient error vs central differences: {err:.2e}")

# ---- steering the matching by gradient descent ------------------------

n, m = 3, 5
target = [0, 1, 2]
C = np.random.default_rng(0).uniform(size=(n, m))

# a soft inner solve (damped, few iterations) keeps the relaxation away
# from the vertex so gradients stay alive
cfg = SolverConfig(max_iters=12, step_size=0.3)
x0 = np.ones(n * m + m)

grad_loss = np.zeros(n * m + m)
for i, t in enumerate(target):
    grad_loss[i * m + t] = -1.0     # loss = sum_i (1 - X[i, target[i]])

print(f"\ntarget assignment: {target}")
for step in range(200):
    result, tape = solve_with_tape(build_matching_lp(MatchingInstance(C)),
                                   cfg, x0=x0)
    X, _ = split_matching_vars(result.x, n, m)
    loss = sum(1.0 - X[i, t] for i, t in enumerate(target))
    if step % 50 == 0:
        print(f"  step {step:3d}: loss {loss:.3f}  decoded "
              f"{decode_matching(result.x, n, m).map}")
    grads = backward(tape, grad_loss)
    C = C - 0.5 * matching_cost_gradient(grads.grad_c, n, m)

result, _ = solve_with_tape(build_matching_lp(MatchingInstance(C)), cfg, x0=x0)
print("final decoded:", decode_matching(result.x, n, m).map)

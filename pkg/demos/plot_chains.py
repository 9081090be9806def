"""
Bridging a large gap with a chain
=================================

The arithmetic/power inverse problem needs Y < gamma X with gamma a fixed
constant. A chain X = Z_1 <= ... <= Z_M = Y with every ratio below gamma0
lets us solve it link by link for any X <= Y.
"""

import numpy as np

from meanlab import chain_decompose, chain_solve_global, chain_solve_sqrt

###############################################################################
# The hand-sized example: identity to diag(1.9, 1.1) at gamma0 = 1.2. The
# first direction needs three full steps before it is finalized; the second
# is finalized immediately.
w = chain_decompose(np.eye(2), np.diag([1.9, 1.1]), 1.2)
for Z in w.Zs:
    print(np.round(np.diag(Z), 6))
print("levels:", w.levels, "all ratios ok:", w.ratios_ok)

###############################################################################
# Solving each link with the power-2 solver.
sol = chain_solve_global(2.0, [[1.0]], [[4.0]])
print(f"[1] -> [4]: {len(sol)} elements at gamma0 = {sol.gamma0:.4f}, solved: {sol.solved}")
worst = max(max(l.solution.residual_X, l.solution.residual_Y) for l in sol.links)
print("worst link residual:", worst)

###############################################################################
# The same idea with the closed-form half-power solver.
sq = chain_solve_sqrt(np.eye(2), np.diag([4.0, 2.0]))
print("sqrt chain:", len(sq), "elements, solved:", sq.solved)

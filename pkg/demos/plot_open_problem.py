"""
An open inverse problem, explored numerically
=============================================

Given X <= Y, are there A, B with naive half-power mean X and naive
quadratic mean Y? No general construction is known. The explorer runs a
fixed-point iteration and reports "solved" only when both residuals are
below 1e-8 relative. A "not-solved" result says nothing about existence.
"""

import numpy as np

from meanlab import explore_open_problem, random_spd

###############################################################################
# Commuting inputs reduce to independent scalar problems.
res = explore_open_problem(0.5, 2.0, np.diag([1.0, 2.0]), np.diag([1.2, 2.3]))
print(res.status, "after", res.iterations, "iterations")
print("A =", np.round(np.diag(res.A), 8), " B =", np.round(np.diag(res.B), 8))

###############################################################################
# A few non-commuting pairs with growing gaps.
rng = np.random.default_rng(5)
X = random_spd(3, rng, 1.0, 2.0)
for scale in (0.05, 0.3, 1.0, 3.0):
    Y = X + scale * random_spd(3, rng, 0.2, 1.0)
    r = explore_open_problem(0.5, 2.0, X, Y, max_iters=300)
    print(f"gap {scale:>4}: {r.status:<10} residuals {r.residual_X:.1e} / {r.residual_Y:.1e}")

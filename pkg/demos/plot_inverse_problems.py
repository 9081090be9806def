"""
Inverse mean problems
=====================

Given X <= Y, find positive definite A and B whose geometric mean is X and
whose power mean is Y. The construction whitens by X^(-1/2), solves one scalar
equation per eigenvalue and maps back, so the answer is exact up to rounding.
"""

import numpy as np

from meanlab import (
    geometric_mean,
    kubo_ando_mean,
    random_spd,
    solve_arith_power_local,
    solve_arith_quadratic,
    solve_geom_power,
    solve_sqrt_arith,
)

rng = np.random.default_rng(1)
X = random_spd(4, rng, 1.0, 3.0)
Y = X + random_spd(4, rng, 0.1, 1.0)

sol = solve_geom_power(0.5, X, Y)
print("geometric/power, residuals:", sol.residual_X, sol.residual_Y, "certified:", sol.certified)
print("recomputed A#B - X:", np.abs(geometric_mean(sol.A, sol.B) - X).max())
print("recomputed P(1/2) - Y:", np.abs(kubo_ando_mean(0.5, sol.A, sol.B) - Y).max())

###############################################################################
# The arithmetic/power version only works for Y close to X: the ratio must
# stay below 2^(1 - 1/r). Outside that band the solver refuses.
Ynear = X + 0.05 * random_spd(4, rng, 0.5, 1.0)
print(solve_arith_power_local(2.0, X, Ynear).condition)
try:
    solve_arith_power_local(2.0, X, 2 * X)
except Exception as exc:
    print("refused:", type(exc).__name__, exc)

###############################################################################
# Two closed forms. For the half-power/arithmetic pair,
# A = (X^(1/2) + (Y-X)^(1/2))^2 and B = (X^(1/2) - (Y-X)^(1/2))^2.
s = solve_sqrt_arith([[1.0]], [[1.5]])
print("sqrt-arith on scalars:", s.A.item(), s.B.item())

# Squaring everything gives the arithmetic/quadratic pair. Inputs with Y^2
# between sqrt(2) X^2 and 2 X^2 are solved but tagged.
print(solve_arith_quadratic([[1.0]], [[1.1]]).tags, solve_arith_quadratic([[1.0]], [[1.3]]).tags)

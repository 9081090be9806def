"""
Matrix power means and their ordering
=====================================

The Kubo-Ando power mean of two positive definite matrices interpolates
between the geometric mean (p -> 0) and the arithmetic mean (p = 1), and
keeps growing for p > 1. Here we compute a few of them for a random pair and
check the Loewner ordering along the way.
"""

import numpy as np

from meanlab import (
    divergence_phi,
    geometric_mean,
    kubo_ando_mean,
    loewner_leq,
    min_mean,
    naive_power_mean,
    random_spd,
)

rng = np.random.default_rng(0)
A = random_spd(3, rng, 0.5, 4.0)
B = random_spd(3, rng, 0.5, 4.0)

###############################################################################
# Walk p from 0 to 3. Each mean should sit above the previous one.
ps = [0.0, 0.25, 0.5, 1.0, 2.0, 3.0]
means = [kubo_ando_mean(p, A, B) for p in ps]
for (p0, M0), (p1, M1) in zip(zip(ps, means), zip(ps[1:], means[1:])):
    res = loewner_leq(M0, M1)
    print(f"P({p0:g}) <= P({p1:g}): {bool(res)}  (min eigenvalue of gap {res.eigenvalue:+.3e})")

###############################################################################
# p = 0 is the geometric mean.
G = geometric_mean(A, B)
print("P(0) == A#B:", np.allclose(means[0], G))

###############################################################################
# For numbers, min(a, b) <= sqrt(ab). The matrix min mean (A + B - |A - B|)/2
# does not stay below A#B once A and B stop commuting. This pair has
# |A - B| = 3I, a min mean that is not even positive semidefinite, and a gap
# of sqrt(13) - 5 along (1, -1).
C = np.array([[2.0, -3.0], [-3.0, 5.0]])
D = np.array([[5.0, -3.0], [-3.0, 2.0]])
res = loewner_leq(min_mean(C, D), geometric_mean(C, D))
print("min mean <= C#D:", bool(res), f"(eigenvalue {res.eigenvalue:.6f}, sqrt(13) - 5 = {np.sqrt(13) - 5:.6f})")

###############################################################################
# The naive power mean ((A^p + B^p)/2)^(1/p) is a different object once A and
# B do not commute, but for p in [1/2, 1] it still sits below the
# arithmetic mean. The trace of the gap is the divergence.
for p in (0.5, 0.75, 1.0):
    N = naive_power_mean(p, A, B)
    print(f"p={p}: naive vs Kubo-Ando differ by {np.abs(N - kubo_ando_mean(p, A, B)).max():.3e}, "
          f"divergence {divergence_phi(p, A, B):.6f}")

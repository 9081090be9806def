"""
Hunting for non-monotone matrix functions
=========================================

f is operator monotone when A <= B forces f(A) <= f(B). sqrt and log(1+t)
are; t^2 is not. The lab samples ordered pairs and reports the first
violation with a witness you can re-check by hand.
"""

import numpy as np

from meanlab import Hypothesis, ScalarFunction
from meanlab.verify import prop31_counterexample, test_characterization, test_monotonicity

for name in ("sqrt", "log1p", "ratio", "power:0.5", "power:2"):
    v = test_monotonicity(ScalarFunction.parse(name), dim=range(1, 6), samples=500, seed=3)
    print(f"{name:>10}: {v.status} after {v.samples_run} samples")

###############################################################################
# The classic 2x2 witness: B - A = diag(1, 0) is PSD but B^2 - A^2 is not.
A = np.array([[1.0, 1.0], [1.0, 1.0]])
B = np.array([[2.0, 1.0], [1.0, 1.0]])
print("eigenvalues of B - A:", np.linalg.eigvalsh(B - A))
print("eigenvalues of B^2 - A^2:", np.linalg.eigvalsh(B @ B - A @ A))

###############################################################################
# A mean inequality such as (A+B)/2 <= P(2, A, B) after applying f holds for
# every pair only if f is operator monotone. With f = t^2 the lab builds
# counterexample pairs from the monotonicity witness.
rep = test_characterization(ScalarFunction.power(2), Hypothesis.parse("arith-vs-power:2"), [2, 3], 200, 0)
print("inequality:", rep.inequality.status, "monotonicity:", rep.monotonicity.status, "consistent:", rep.consistent)

###############################################################################
# The naive-power-mean version of that inequality is weaker: t^1.5 satisfies
# it on every sample although it is not operator monotone.
rep = prop31_counterexample(q=4.0, r=1.5, dim=3, samples=300, seed=0)
for label, v in zip(("link 1", "link 2", "link 3"), rep.links):
    print(label, v.status)
print("t^1.5 monotone?", rep.monotonicity.status, "-> demonstrated:", rep.demonstrated)

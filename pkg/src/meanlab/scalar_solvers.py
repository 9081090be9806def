"""
Monotone-branch inversion of the scalar power-mean profiles
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
Two one-dimensional functions drive the inverse mean constructions:

* ``h_p(a) = ((a**p + a**-p) / 2)**(1/p)``: the power mean of ``a`` and
  ``1/a``, whose geometric mean is 1. Increasing on ``a >= 1`` from 1 to
  infinity.
* ``phi_r(a) = ((a**r + (2 - a)**r) / 2)**(1/r)``: the power mean of ``a``
  and ``2 - a``, whose arithmetic mean is 1. Monotone on ``[1, 2]`` between
  1 and ``gamma(r) = 2**(1 - 1/r)``.

Both are inverted on the stated branch by bracketing bisection followed by a
few Newton steps. ``h_p`` is symmetric under ``a -> 1/a`` and ``phi_r`` under
``a -> 2 - a``, so the other root is always available to the caller.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidInput, NumericalFailure, OutOfRange

ENDPOINT_SLACK = 1e-12
RESIDUAL_RTOL = 1e-12
BISECT_RTOL = 1e-13
NEWTON_STEPS = 3
CHAIN_GUARD = 1e-12


@dataclass(frozen=True)
class BranchedRoot:
    value: float
    residual: float
    iterations: int

    def __float__(self) -> float:
        return self.value


def gamma_of(r: float) -> float:
    """``2**(1 - 1/r)``: the largest ratio ``phi_r`` can reach (smallest, if r < 1)."""
    if not r > 0:
        raise InvalidInput(f"gamma_of needs r > 0, got {r}")
    return 2.0 ** (1.0 - 1.0 / r)


def h_value(p: float, a: float) -> float:
    """``h_p(a) = cosh(p log a)**(1/p)`` evaluated via a stable log-cosh."""
    x = abs(p * math.log(a))
    logcosh = x + math.log1p(math.exp(-2.0 * x)) - math.log(2.0)
    return math.exp(logcosh / p)


def _h_slope(p: float, a: float, value: float) -> float:
    return value * math.tanh(p * math.log(a)) / a


def phi_value(r: float, a: float) -> float:
    return ((a**r + (2.0 - a) ** r) / 2.0) ** (1.0 / r)


def _phi_slope(r: float, a: float, value: float) -> float:
    b = 2.0 - a
    if b <= 0.0 and r < 1.0:
        return math.inf
    return value ** (1.0 - r) * (a ** (r - 1.0) - b ** (r - 1.0)) / 2.0


def _solve_increasing(g, slope, target, lo, hi):
    """Root of ``g(a) = target`` for ``g`` increasing on ``[lo, hi]``.

    ``g(lo) <= target <= g(hi)`` is assumed. Returns ``(a, residual, iterations)``.
    """
    a0, b0 = lo, hi
    it = 0
    while hi - lo > BISECT_RTOL * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        it += 1
        if g(mid) < target:
            lo = mid
        else:
            hi = mid
    rl, rh = abs(g(lo) - target), abs(g(hi) - target)
    a, res = (lo, rl) if rl <= rh else (hi, rh)
    for _ in range(NEWTON_STEPS):
        if res == 0.0:
            break
        value = g(a)
        d = slope(a, value)
        if not (math.isfinite(d) and d != 0.0):
            break
        cand = a - (value - target) / d
        if not a0 <= cand <= b0:
            break
        cres = abs(g(cand) - target)
        it += 1
        if cres >= res:
            break
        a, res = cand, cres
    return a, res, it


def _check(root: BranchedRoot, target: float, what: str) -> BranchedRoot:
    if root.residual > RESIDUAL_RTOL * (1.0 + abs(target)):
        raise NumericalFailure(f"{what}: residual {root.residual:.3e} above tolerance")
    return root


def invert_h(p: float, y: float) -> BranchedRoot:
    """Solve ``h_p(a) = y`` for ``a >= 1``.

    Parameters
    ----------
    p : float in (0, 1]
    y : float >= 1 (targets down to ``1 - 1e-12`` are read as 1)

    Raises
    ------
    OutOfRange
        If ``y < 1 - 1e-12``.
    """
    if not 0 < p <= 1:
        raise InvalidInput(f"invert_h needs 0 < p <= 1, got {p}")
    if not math.isfinite(y):
        raise InvalidInput("target must be finite")
    if y < 1.0 - ENDPOINT_SLACK:
        raise OutOfRange(f"h_p ranges over [1, inf); target {y} is below 1")
    if y <= 1.0:
        return BranchedRoot(1.0, abs(1.0 - y), 0)
    # a * 2**(-1/p) <= h_p(a) <= a on a >= 1
    lo, hi = y, y * 2.0 ** (1.0 / p)
    a, res, it = _solve_increasing(
        lambda a: h_value(p, a), lambda a, v: _h_slope(p, a, v), y, lo, hi
    )
    return _check(BranchedRoot(a, res, it), y, "invert_h")


def invert_phi(r: float, x: float) -> BranchedRoot:
    """Solve ``phi_r(a) = x`` for ``a`` in ``[1, 2]``.

    For ``r >= 1`` the target must lie in ``[1, gamma_of(r)]``; for ``r <= 1``
    in ``[gamma_of(r), 1]``, each with ``1e-12`` slack. At ``r = 1`` the profile
    is constant and the only admissible target is 1.
    """
    if not r > 0:
        raise InvalidInput(f"invert_phi needs r > 0, got {r}")
    if not math.isfinite(x):
        raise InvalidInput("target must be finite")
    gam = gamma_of(r)
    lo_t, hi_t = (1.0, gam) if r >= 1 else (gam, 1.0)
    if not lo_t - ENDPOINT_SLACK <= x <= hi_t + ENDPOINT_SLACK:
        raise OutOfRange(f"phi_{r:g} ranges over [{lo_t:.15g}, {hi_t:.15g}]; target {x!r}")
    if r == 1 or x == 1.0:
        return BranchedRoot(1.0, abs(x - 1.0), 0)
    clamped = min(max(x, lo_t), hi_t)
    if r > 1:
        g = lambda a: phi_value(r, a)
        slope = lambda a, v: _phi_slope(r, a, v)
        target = clamped
    else:
        # phi_r decreases on [1, 2]; negate to reuse the increasing solver
        g = lambda a: -phi_value(r, a)
        slope = lambda a, v: -_phi_slope(r, a, -v)
        target = -clamped
    a, _, it = _solve_increasing(g, slope, target, 1.0, 2.0)
    res = abs(phi_value(r, a) - x)
    return _check(BranchedRoot(a, res, it), x, "invert_phi")


def scalar_chain(x: float, y: float, gamma0: float) -> list[float]:
    """Geometric bridge ``x, x*g, x*g**2, ..., y`` with every ratio at most ``g``.

    The number of steps is ``ceil(log(y/x) / log(gamma0))``; the last step is
    the (possibly shorter) remainder up to ``y``.
    """
    if not x > 0:
        raise InvalidInput(f"scalar_chain needs x > 0, got {x}")
    if not y >= x:
        raise InvalidInput(f"scalar_chain needs y >= x, got x={x}, y={y}")
    if not gamma0 > 1:
        raise InvalidInput(f"scalar_chain needs gamma0 > 1, got {gamma0}")
    x, y = float(x), float(y)
    if y == x:
        return [x]
    v = math.log(y / x) / math.log(gamma0)
    steps = max(1, math.ceil(v - CHAIN_GUARD * max(1.0, v)))
    return [x * gamma0**k for k in range(steps)] + [y]

"""
Inverse mean problems
~~~~~~~~~~~~~~~~~~~~~
Given Loewner-ordered ``X <= Y``, construct SPD ``A, B`` whose two prescribed
means are exactly ``X`` and ``Y``.

Every solver whitens by ``X^{-1/2}``, solves a commuting problem in the
eigenbasis of ``Y0 = X^{-1/2} Y X^{-1/2}`` one eigenvalue at a time with the
scalar solvers, and maps the answer back by the congruence ``X^{1/2} . X^{1/2}``.
Ratio-restricted solvers are extended to arbitrary ``X <= Y`` by splitting the
gap into a chain ``X = Z_1 <= Z_2 <= ... <= Z_M = Y`` whose consecutive ratios
stay below ``gamma0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, HypothesisViolated, InvalidInput, NumericalFailure
from .linalg import (
    as_symmetric,
    eig_sym,
    loewner_leq,
    max_abs,
    psd_eps,
    spectral,
)
from .means import KuboAndoFamily, naive_power_mean
from .scalar_solvers import CHAIN_GUARD, gamma_of, invert_h, invert_phi

ORDER_TOL = 1e-9
BAND = 1e-9
BAND_TOL = 1e-12
RESIDUAL_RTOL = 1e-8
UNIT_SNAP = 1e-10
SQRT_CHAIN_GAMMA0 = 1.5


@dataclass
class InverseSolution:
    """A pair ``(A, B)`` with the max-norm errors of the two mean equations.

    ``certified`` is the validity certificate: both residuals within
    ``tolerance`` and both matrices PSD (SPD where the problem demands it).
    """

    A: np.ndarray
    B: np.ndarray
    residual_X: float
    residual_Y: float
    condition: str
    tolerance: float
    definite: bool
    tags: tuple[str, ...] = ()

    @property
    def certified(self) -> bool:
        return self.definite and max(self.residual_X, self.residual_Y) <= self.tolerance


@dataclass
class ChainLink:
    ratio_ok: bool
    solution: InverseSolution | None = None


@dataclass
class ChainWitness:
    """Chain ``Zs[0] = X <= ... <= Zs[-1] = Y`` with ``Z_{k+1} <= gamma0 Z_k``.

    ``levels`` holds, per eigenvalue of ``X^{-1/2} Y X^{-1/2}`` (descending),
    the integer ``m`` with ``gamma0**m < lambda <= gamma0**(m+1)``;
    ``majorant`` is ``gamma0**(max(levels)+1) X``, the bound that closes the
    chain from above (not itself a chain element).
    """

    Zs: list[np.ndarray]
    gamma0: float
    links: list[ChainLink]
    levels: np.ndarray
    majorant: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.Zs)

    @property
    def ratios_ok(self) -> bool:
        return all(link.ratio_ok for link in self.links)

    @property
    def solved(self) -> bool:
        return all(link.solution is not None and link.solution.certified for link in self.links)


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def _pair(X, Y):
    X = as_symmetric(X, name="X")
    Y = as_symmetric(Y, name="Y")
    if X.shape != Y.shape:
        raise InvalidInput(f"dimension mismatch: {X.shape} vs {Y.shape}")
    return X, Y


def _roots(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(X^{1/2}, X^{-1/2})`` of an SPD matrix from one eigendecomposition."""
    eig = eig_sym(X)
    if eig.lambdas[-1] <= psd_eps(X):
        raise DomainError(f"X is not positive definite (min eigenvalue {eig.lambdas[-1]:.3e})")
    root = np.sqrt(eig.lambdas)
    return spectral(eig.Q, root), spectral(eig.Q, 1.0 / root)


def _psd_sqrt(M: np.ndarray) -> np.ndarray:
    eig = eig_sym(M)
    return spectral(eig.Q, np.sqrt(np.maximum(eig.lambdas, 0.0)))


def _tolerance(X, Y) -> float:
    return RESIDUAL_RTOL * (1.0 + max_abs(X) + max_abs(Y))


def _is_spd(M: np.ndarray) -> bool:
    return bool(eig_sym(M).lambdas[-1] > psd_eps(M))


def _is_psd(M: np.ndarray) -> bool:
    return bool(eig_sym(M).lambdas[-1] >= -psd_eps(M))


def _require_leq(X, Y, tol: float, message: str) -> None:
    if not loewner_leq(X, Y, tol):
        raise HypothesisViolated(message)


def _whitened(X, Y):
    Xh, Xih = _roots(X)
    return Xh, eig_sym(_sym(Xih @ Y @ Xih))


def _snap_unit(lam: np.ndarray) -> np.ndarray:
    # h_p and phi_r are flat at 1, so whitening roundoff of order eps would
    # turn into a root offset of order sqrt(eps); snap it away instead
    lam = lam.copy()
    lam[np.abs(lam - 1.0) <= UNIT_SNAP] = 1.0
    return lam


# --------------------------------------------------------------------------
# local solvers
# --------------------------------------------------------------------------


def solve_geom_power(p: float, X, Y) -> InverseSolution:
    """Find ``A, B`` with ``A # B = X`` and ``P(p, A, B) = Y`` for ``X <= Y``.

    In the whitened frame ``B0 = A0^{-1}`` so the geometric mean is ``I``,
    and ``A0`` has eigenvalues ``a_i >= 1`` solving
    ``((a^p + a^-p) / 2)^{1/p} = lambda_i(Y0)``.
    """
    if not 0 < p <= 1:
        raise InvalidInput(f"geometric/power inverse needs 0 < p <= 1, got {p}")
    X, Y = _pair(X, Y)
    Xh, eig = _whitened(X, Y)
    _require_leq(X, Y, ORDER_TOL, "need X <= Y")
    lam = _snap_unit(np.maximum(eig.lambdas, 1.0))
    a = np.array([invert_h(p, float(v)).value for v in lam])
    A = _sym(Xh @ eig.compose(a) @ Xh)
    B = _sym(Xh @ eig.compose(1.0 / a) @ Xh)
    fam = KuboAndoFamily(A, B)
    return InverseSolution(
        A,
        B,
        max_abs(fam.geometric() - X),
        max_abs(fam.power(p) - Y),
        condition="X <= Y",
        tolerance=_tolerance(X, Y),
        definite=_is_spd(A) and _is_spd(B),
    )


def solve_arith_power_local(r: float, X, Y) -> InverseSolution:
    """Find ``A, B`` with ``(A + B)/2 = X`` and ``P(r, A, B) = Y``.

    Needs ``X <= Y < gamma X`` when ``r > 1`` and ``gamma X < Y <= X`` when
    ``r < 1``, where ``gamma = 2**(1 - 1/r)``; the strict side is enforced
    with a ``1e-9`` band. At ``r = 1`` only ``Y = X`` is solvable.
    In the whitened frame ``B0 = 2I - A0``.
    """
    if not r > 0:
        raise InvalidInput(f"arithmetic/power inverse needs r > 0, got {r}")
    X, Y = _pair(X, Y)
    gam = gamma_of(r)
    Xh, eig = _whitened(X, Y)
    if r > 1:
        _require_leq(X, Y, ORDER_TOL, "need X <= Y")
        _require_leq(Y, (gam - BAND) * X, BAND_TOL, f"need Y < {gam:.12g} X")
        condition = f"X <= Y < {gam:.12g} X"
        lo, hi = 1.0, gam
    elif r < 1:
        _require_leq(Y, X, ORDER_TOL, "need Y <= X")
        _require_leq((gam + BAND) * X, Y, BAND_TOL, f"need {gam:.12g} X < Y")
        condition = f"{gam:.12g} X < Y <= X"
        lo, hi = gam, 1.0
    else:
        _require_leq(X, Y, ORDER_TOL, "r = 1 needs Y = X")
        _require_leq(Y, X, ORDER_TOL, "r = 1 needs Y = X")
        condition = "Y = X"
        lo = hi = 1.0
    lam = _snap_unit(np.clip(eig.lambdas, lo, hi))
    delta = np.array([invert_phi(r, float(v)).value for v in lam])
    A = _sym(Xh @ eig.compose(delta) @ Xh)
    B = _sym(Xh @ eig.compose(2.0 - delta) @ Xh)
    fam = KuboAndoFamily(A, B, psd_b=True)
    return InverseSolution(
        A,
        B,
        max_abs(0.5 * (A + B) - X),
        max_abs(fam.power(r) - Y),
        condition=condition,
        tolerance=_tolerance(X, Y),
        definite=_is_spd(A) and _is_spd(B),
    )


def solve_sqrt_arith(X, Y) -> InverseSolution:
    """Closed form for ``((A^{1/2} + B^{1/2}) / 2)^2 = X`` and ``(A + B)/2 = Y``.

    ``A = (X^{1/2} + (Y - X)^{1/2})^2`` and ``B = (X^{1/2} - (Y - X)^{1/2})^2``,
    valid for PSD ``X <= Y < 2X``. The difference ``X^{1/2} - (Y - X)^{1/2}``
    must itself be PSD, otherwise ``B^{1/2}`` is not that difference and the
    first equation fails; this is checked explicitly.
    """
    X, Y = _pair(X, Y)
    for M, name in ((X, "X"), (Y, "Y")):
        if not _is_psd(M):
            raise DomainError(f"{name} is not positive semidefinite")
    _require_leq(X, Y, ORDER_TOL, "need X <= Y")
    _require_leq(Y, (2.0 - BAND) * X, BAND_TOL, "need Y < 2X")
    Xh = _psd_sqrt(X)
    D = _psd_sqrt(Y - X)
    S = Xh - D
    if not eig_sym(S).lambdas[-1] >= -psd_eps(Xh):
        raise NumericalFailure("X^{1/2} - (Y - X)^{1/2} is not positive semidefinite")
    T = Xh + D
    A = _sym(T @ T)
    B = _sym(S @ S)
    return InverseSolution(
        A,
        B,
        max_abs(naive_power_mean(0.5, A, B, strict=False) - X),
        max_abs(0.5 * (A + B) - Y),
        condition="X <= Y < 2X",
        tolerance=_tolerance(X, Y),
        definite=_is_psd(A) and _is_psd(B),
    )


def solve_arith_quadratic(X, Y) -> InverseSolution:
    """Find ``A, B`` with ``(A + B)/2 = X`` and ``((A^2 + B^2)/2)^{1/2} = Y``.

    Accepts ``X^2 <= Y^2 < 2 X^2``. Inputs with ``Y^2`` above ``sqrt(2) X^2``
    are solved but tagged ``beyond-sqrt2-band``.
    """
    X, Y = _pair(X, Y)
    _roots(X)
    X2, Y2 = _sym(X @ X), _sym(Y @ Y)
    _require_leq(X2, Y2, ORDER_TOL, "need X^2 <= Y^2")
    _require_leq(Y2, (2.0 - BAND) * X2, BAND_TOL, "need Y^2 < 2 X^2")
    tags = () if loewner_leq(Y2, math.sqrt(2.0) * X2, BAND_TOL) else ("beyond-sqrt2-band",)
    base = solve_sqrt_arith(X2, Y2)
    A, B = _psd_sqrt(base.A), _psd_sqrt(base.B)
    return InverseSolution(
        A,
        B,
        max_abs(0.5 * (A + B) - X),
        max_abs(naive_power_mean(2.0, A, B, strict=False) - Y),
        condition="X^2 <= Y^2 < 2 X^2",
        tolerance=_tolerance(X, Y),
        definite=_is_psd(A) and _is_psd(B),
        tags=tags,
    )


# --------------------------------------------------------------------------
# chains
# --------------------------------------------------------------------------


def _level(lam: float, gamma0: float) -> int:
    """``m`` with ``gamma0**m < lam <= gamma0**(m+1)``, closed at the top."""
    v = math.log(lam) / math.log(gamma0)
    return math.ceil(v - CHAIN_GUARD * max(1.0, abs(v))) - 1


def chain_decompose(X, Y, gamma0: float) -> ChainWitness:
    """Split ``X <= Y`` into steps no larger than ``gamma0`` in Loewner ratio.

    Works in the eigenbasis of ``Y0 = X^{-1/2} Y X^{-1/2}``. Starting from
    ``I``, all directions not yet at their target are raised together by a
    factor ``gamma0`` per step; a group of equal eigenvalues is set to its
    target ``lambda_i`` on the step where its level ``m_i`` is reached.
    Each element is mapped back by ``X^{1/2} . X^{1/2}``; the first element
    is ``X`` and the last is ``Y``, both returned as given.
    """
    if not gamma0 > 1 + 1e-9:
        raise InvalidInput(f"gamma0 must exceed 1, got {gamma0}")
    X, Y = _pair(X, Y)
    Xh, eig = _whitened(X, Y)
    _require_leq(X, Y, ORDER_TOL, "need X <= Y")
    lam = np.maximum(eig.lambdas, 1.0)
    levels = np.empty(lam.size, dtype=int)
    for g in eig.groups():
        levels[g] = _level(float(lam[g].max()), gamma0)
    top = int(levels.max())

    values = np.ones_like(lam)
    done = levels < 0
    values[done] = lam[done]
    Zs = [X]
    for level in range(top + 1):
        if level > 0:
            values[levels >= level] = gamma0**level
            Zs.append(_sym(Xh @ eig.compose(values) @ Xh))
        hit = levels == level
        if hit.any():
            values[hit] = lam[hit]
            Zs.append(_sym(Xh @ eig.compose(values) @ Xh))
    if len(Zs) > 1:
        Zs[-1] = Y
    elif not np.array_equal(X, Y):
        Zs.append(Y)

    links = [
        ChainLink(
            bool(loewner_leq(Zs[k], Zs[k + 1], ORDER_TOL))
            and bool(loewner_leq(Zs[k + 1], gamma0 * Zs[k], ORDER_TOL))
        )
        for k in range(len(Zs) - 1)
    ]
    return ChainWitness(Zs, float(gamma0), links, levels, gamma0 ** (top + 1) * X)


def _solve_links(witness: ChainWitness, solver) -> ChainWitness:
    for k, link in enumerate(witness.links):
        link.solution = solver(witness.Zs[k], witness.Zs[k + 1])
    return witness


def chain_solve_global(r: float, X, Y, gamma0: float | None = None) -> ChainWitness:
    """Chain ``X <= Y`` and solve every link with :func:`solve_arith_power_local`.

    Each link ``(Z_k, Z_{k+1})`` gets ``A, B`` with ``(A + B)/2 = Z_k`` and
    ``P(r, A, B) = Z_{k+1}``. ``gamma0`` defaults to ``(1 + gamma_of(r)) / 2``
    and must lie strictly between 1 and ``gamma_of(r)``.
    """
    if not r > 1:
        raise InvalidInput(f"global arithmetic/power chain needs r > 1, got {r}")
    gam = gamma_of(r)
    gamma0 = 0.5 * (1.0 + gam) if gamma0 is None else float(gamma0)
    if not 1 < gamma0 < gam - BAND:
        raise InvalidInput(f"gamma0 must lie in (1, {gam:.12g}), got {gamma0}")
    witness = chain_decompose(X, Y, gamma0)
    return _solve_links(witness, lambda Z0, Z1: solve_arith_power_local(r, Z0, Z1))


def chain_solve_sqrt(X, Y) -> ChainWitness:
    """Chain ``X <= Y`` at ``gamma0 = 1.5`` and solve each link in closed form."""
    witness = chain_decompose(X, Y, SQRT_CHAIN_GAMMA0)
    return _solve_links(witness, solve_sqrt_arith)


# --------------------------------------------------------------------------
# open problem
# --------------------------------------------------------------------------


@dataclass
class ExploreResult:
    status: str
    A: np.ndarray
    B: np.ndarray
    residual_X: float
    residual_Y: float
    iterations: int

    @property
    def solved(self) -> bool:
        return self.status == "solved"


def _clamped_power(M: np.ndarray, r: float) -> np.ndarray:
    eig = eig_sym(M)
    return spectral(eig.Q, np.maximum(eig.lambdas, 0.0) ** r)


def explore_open_problem(p: float, q: float, X, Y, max_iters: int = 500) -> ExploreResult:
    """Numerically look for ``A, B`` with naive power means ``X`` (order p) and ``Y`` (order q).

    Alternates ``B <- (2 X^p - A^p)^{1/p}`` and ``A <- (2 Y^q - B^q)^{1/q}``,
    projecting each bracket onto the PSD cone, starting from ``A = B = X``.
    ``status`` is ``"solved"`` only when both residuals are below
    ``1e-8 * (1 + max|X| + max|Y|)``; anything else is reported as
    ``"not-solved"``. No existence claim is made either way.
    """
    if not (0.5 <= p <= 1 <= q):
        raise InvalidInput(f"need 1/2 <= p <= 1 <= q, got p={p}, q={q}")
    if p == q:
        raise InvalidInput("p and q must differ")
    if max_iters < 0:
        raise InvalidInput("max_iters must be non-negative")
    X, Y = _pair(X, Y)
    for M, name in ((X, "X"), (Y, "Y")):
        if not _is_spd(M):
            raise InvalidInput(f"{name} is not positive definite")
    if not loewner_leq(X, Y, ORDER_TOL):
        raise InvalidInput("need X <= Y")
    tol = _tolerance(X, Y)
    two_xp = 2.0 * _clamped_power(X, p)
    two_yq = 2.0 * _clamped_power(Y, q)

    def residuals(A, B):
        return (
            max_abs(naive_power_mean(p, A, B, strict=False) - X),
            max_abs(naive_power_mean(q, A, B, strict=False) - Y),
        )

    A, B = X.copy(), X.copy()
    res = residuals(A, B)
    it = 0
    while max(res) >= tol and it < max_iters:
        it += 1
        B = _clamped_power(two_xp - _clamped_power(A, p), 1.0 / p)
        A = _clamped_power(two_yq - _clamped_power(B, q), 1.0 / q)
        res = residuals(A, B)
    status = "solved" if max(res) < tol else "not-solved"
    return ExploreResult(status, A, B, res[0], res[1], it)

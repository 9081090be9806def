"""
Dense real symmetric linear algebra
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
Cyclic Jacobi eigensolver, spectral functional calculus, Loewner-order
comparison, congruence transforms and seeded random SPD sampling.

Symmetric matrices are plain ``numpy`` float64 arrays of shape ``(n, n)``;
:func:`as_symmetric` is the single gate that validates and symmetrizes them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numba import njit
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, IllConditioned, InvalidInput, NumericalFailure

SYMMETRY_RTOL = 1e-12
PSD_RTOL = 1e-10
GROUP_RTOL = 1e-9
JACOBI_RTOL = 1e-13
JACOBI_MAX_SWEEPS = 64
MAX_CONDITION = 1e12


def max_abs(M) -> float:
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def psd_eps(M) -> float:
    """Clamping threshold for eigenvalues of ``M`` that sit just below zero."""
    return PSD_RTOL * (1.0 + max_abs(M))


def as_symmetric(M, *, rtol: float = SYMMETRY_RTOL, name: str = "matrix") -> np.ndarray:
    """Validate ``M`` as a real symmetric matrix and return ``(M + M.T) / 2``.

    Raises
    ------
    InvalidInput
        If ``M`` is not a non-empty square 2-D array of finite reals, or if
        it is asymmetric beyond ``rtol * (1 + max|M|)``.
    """
    try:
        A = np.array(M, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name}: not a real array ({exc})") from None
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise InvalidInput(f"{name}: expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput(f"{name}: non-finite entries")
    if max_abs(A - A.T) > rtol * (1.0 + max_abs(A)):
        raise InvalidInput(f"{name}: not symmetric")
    return 0.5 * (A + A.T)


def _same_dim(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape != B.shape:
        raise InvalidInput(f"dimension mismatch: {A.shape} vs {B.shape}")


# --------------------------------------------------------------------------
# Eigendecomposition
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _jacobi_kernel(a, rtol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n)
    norm = np.sqrt(np.sum(a * a))
    sweeps = 0
    while True:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j] * a[i, j]
        if np.sqrt(off) <= rtol * norm:
            return a, v, sweeps
        if sweeps >= max_sweeps:
            return a, v, -1
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq


class EigenDecomp(NamedTuple):
    """``M = Q @ diag(lambdas) @ Q.T`` with ``lambdas`` sorted descending."""

    Q: np.ndarray
    lambdas: np.ndarray

    def compose(self, values=None) -> np.ndarray:
        """Rebuild ``Q diag(values) Q^T``; defaults to the eigenvalues themselves."""
        vals = self.lambdas if values is None else np.asarray(values, dtype=np.float64)
        return spectral(self.Q, vals)

    def groups(self, rtol: float = GROUP_RTOL) -> list[np.ndarray]:
        """Index arrays of eigenvalues equal to within ``rtol`` (relative).

        Consecutive sorted eigenvalues are chained into one group while each
        gap stays below ``rtol * max(1, |lambda|)``.
        """
        lam = self.lambdas
        out: list[list[int]] = [[0]]
        for i in range(1, lam.size):
            if lam[i - 1] - lam[i] <= rtol * max(1.0, abs(lam[i - 1])):
                out[-1].append(i)
            else:
                out.append([i])
        return [np.array(g) for g in out]


def spectral(Q: np.ndarray, values: np.ndarray) -> np.ndarray:
    """``Q diag(values) Q^T``, symmetrized."""
    M = (Q * values) @ Q.T
    return 0.5 * (M + M.T)


def eig_sym(M) -> EigenDecomp:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps continue until the off-diagonal Frobenius mass drops below
    ``1e-13 * ||M||_F``. The result is a pure function of the input bits.
    """
    A = as_symmetric(M)
    n = A.shape[0]
    if n == 1:
        return EigenDecomp(np.ones((1, 1)), A[0].copy())
    a, v, sweeps = _jacobi_kernel(np.ascontiguousarray(A), JACOBI_RTOL, JACOBI_MAX_SWEEPS)
    if sweeps < 0:
        raise NumericalFailure(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    lam = np.diag(a).copy()
    order = np.argsort(-lam, kind="stable")
    return EigenDecomp(v[:, order], lam[order])


# --------------------------------------------------------------------------
# Functional calculus
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarFunction:
    """A scalar function applied to symmetric matrices spectrally.

    ``kind`` is one of ``power``, ``sqrt``, ``log1p``, ``ratio``,
    ``identity``, ``abs``, ``repower`` (the power-mean representing function
    ``((1 + t**p) / 2)**(1/p)``) or ``tabulated`` (monotone cubic
    interpolation through ``grid``).
    """

    kind: str
    param: float | None = None
    grid: tuple[tuple[float, ...], tuple[float, ...]] | None = field(default=None, compare=False)

    KINDS = ("power", "sqrt", "log1p", "ratio", "identity", "abs", "repower", "tabulated")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidInput(f"unknown scalar function kind {self.kind!r}")
        if self.kind in ("power", "repower"):
            if self.param is None or not np.isfinite(self.param):
                raise InvalidInput(f"{self.kind} needs a finite real parameter")
        if self.kind == "tabulated":
            if self.grid is None:
                raise InvalidInput("tabulated function needs a grid")
            ts, fs = (np.asarray(g, dtype=np.float64) for g in self.grid)
            if ts.ndim != 1 or ts.shape != fs.shape or ts.size < 2 or np.any(np.diff(ts) <= 0):
                raise InvalidInput("tabulated grid must be two equal-length arrays, t increasing")
            object.__setattr__(self, "_interp", PchipInterpolator(ts, fs, extrapolate=True))

    # constructors -------------------------------------------------------

    @classmethod
    def power(cls, r: float) -> ScalarFunction:
        return cls("power", float(r))

    @classmethod
    def representing(cls, p: float) -> ScalarFunction:
        return cls("repower", float(p))

    @classmethod
    def tabulated(cls, ts, fs) -> ScalarFunction:
        return cls("tabulated", grid=(tuple(map(float, ts)), tuple(map(float, fs))))

    @classmethod
    def parse(cls, text: str) -> ScalarFunction:
        """Parse ``name`` or ``name:param``, e.g. ``sqrt`` or ``power:1.5``."""
        name, _, arg = text.strip().lower().partition(":")
        aliases = {"pow": "power", "representing": "repower", "id": "identity"}
        name = aliases.get(name, name)
        if name in ("power", "repower"):
            try:
                return cls(name, float(arg))
            except ValueError:
                raise InvalidInput(f"{name} needs a numeric parameter, got {arg!r}") from None
        if arg:
            raise InvalidInput(f"{name} takes no parameter")
        return cls(name)

    def label(self) -> str:
        return self.kind if self.param is None else f"{self.kind}:{self.param:g}"

    # evaluation -----------------------------------------------------------

    @property
    def needs_strictly_positive(self) -> bool:
        return (self.kind == "power" and self.param < 0) or (
            self.kind == "repower" and self.param < 0
        )

    @property
    def needs_nonnegative(self) -> bool:
        if self.kind in ("identity", "abs"):
            return False
        if self.kind == "power":
            return not float(self.param).is_integer()
        return True

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        k = self.kind
        if k == "identity":
            return t.copy()
        if k == "abs":
            return np.abs(t)
        if k == "sqrt":
            return np.sqrt(t)
        if k == "log1p":
            return np.log1p(t)
        if k == "ratio":
            return t / (1.0 + t)
        if k == "power":
            r = self.param
            if float(r).is_integer() and r >= 0:
                return t ** int(r)
            return t**r
        if k == "repower":
            return representing_values(self.param, t)
        return self._interp(t)


def representing_values(p: float, t):
    """Elementwise ``((1 + t**p) / 2)**(1/p)``, with ``p = 0`` read as ``sqrt(t)``.

    Evaluated as ``exp(log1p(expm1(p log t) / 2) / p)`` so that very small
    ``p`` stays accurate.
    """
    t = np.asarray(t, dtype=np.float64)
    if p == 0:
        return np.sqrt(t)
    with np.errstate(divide="ignore"):
        logt = np.log(t)
    if p > 0:
        # t = 0: t**p = 0, value 2**(-1/p)
        u = np.where(t > 0, np.expm1(p * np.where(t > 0, logt, 0.0)), -1.0)
    else:
        u = np.expm1(p * logt)
    with np.errstate(invalid="ignore", over="ignore"):
        out = np.exp(np.log1p(0.5 * u) / p)
    # |p log t| tiny: second-order series, exact in double precision and
    # immune to the underflow of p log t at subnormal p
    x = p * logt
    small = (t > 0) & np.isfinite(logt) & (np.abs(x) < 1e-8)
    if np.any(small):
        ls = np.where(small, logt, 0.0)
        out = np.where(small, np.exp(0.5 * ls + p * ls * ls / 8.0), out)
    return out


def _checked_eigs(eig: EigenDecomp, f: ScalarFunction, eps: float) -> np.ndarray:
    lam = eig.lambdas
    if f.needs_strictly_positive:
        if lam[-1] <= 0:
            raise DomainError(f"{f.label()} needs positive eigenvalues, got {lam[-1]:.3e}")
        return lam
    if f.needs_nonnegative:
        if lam[-1] < -eps:
            raise DomainError(f"{f.label()} needs PSD input, got eigenvalue {lam[-1]:.3e}")
        return np.maximum(lam, 0.0)
    return lam


def apply_fun(M, f: ScalarFunction, *, eig: EigenDecomp | None = None) -> np.ndarray:
    """Matrix function ``Q diag(f(lambda)) Q^T`` of a symmetric matrix.

    Eigenvalues in ``[-eps, 0)`` with ``eps = 1e-10 * (1 + max|M|)`` are
    clamped to zero before functions that need a non-negative argument;
    anything more negative raises :class:`DomainError`. A precomputed
    decomposition may be passed as ``eig`` to skip the eigensolve.
    """
    M = as_symmetric(M)
    if eig is None:
        eig = eig_sym(M)
    lam = _checked_eigs(eig, f, psd_eps(M))
    return spectral(eig.Q, f(lam))


def power(M, r: float, *, eig: EigenDecomp | None = None) -> np.ndarray:
    return apply_fun(M, ScalarFunction.power(r), eig=eig)


def sqrtm(M, *, eig: EigenDecomp | None = None) -> np.ndarray:
    return apply_fun(M, ScalarFunction("sqrt"), eig=eig)


def project_psd(M) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm: negative eigenvalues set to zero."""
    eig = eig_sym(M)
    return eig.compose(np.maximum(eig.lambdas, 0.0))


def is_spd(M, eps: float | None = None) -> bool:
    M = as_symmetric(M)
    eps = psd_eps(M) if eps is None else eps
    return bool(eig_sym(M).lambdas[-1] > eps)


def is_psd(M, eps: float | None = None) -> bool:
    M = as_symmetric(M)
    eps = psd_eps(M) if eps is None else eps
    return bool(eig_sym(M).lambdas[-1] >= -eps)


# --------------------------------------------------------------------------
# Loewner order and congruence
# --------------------------------------------------------------------------


class LoewnerResult(NamedTuple):
    """Outcome of ``A <= B``. Truthy iff the order holds.

    ``eigenvalue`` is the smallest eigenvalue of ``B - A`` and ``vector`` its
    unit eigenvector; ``threshold`` is the (negative) acceptance bound.
    """

    holds: bool
    eigenvalue: float
    vector: np.ndarray
    threshold: float

    def __bool__(self) -> bool:
        return self.holds


def loewner_leq(A, B, tol: float = 1e-9) -> LoewnerResult:
    """Test ``A <= B``: ``lambda_min(B - A) >= -tol * (1 + max|A| + max|B|)``."""
    if tol < 0:
        raise InvalidInput("tol must be non-negative")
    A = as_symmetric(A, name="A")
    B = as_symmetric(B, name="B")
    _same_dim(A, B)
    eig = eig_sym(B - A)
    threshold = -tol * (1.0 + max_abs(A) + max_abs(B))
    lam = float(eig.lambdas[-1])
    return LoewnerResult(lam >= threshold, lam, eig.Q[:, -1].copy(), threshold)


def congruence_transform(C, M) -> np.ndarray:
    """``C M C^T`` (symmetrized) for an invertible, not necessarily symmetric ``C``."""
    C = np.array(C, dtype=np.float64)
    if C.ndim == 0:
        C = C.reshape(1, 1)
    M = as_symmetric(M)
    if C.shape != M.shape:
        raise InvalidInput(f"dimension mismatch: {C.shape} vs {M.shape}")
    if not np.all(np.isfinite(C)):
        raise InvalidInput("C has non-finite entries")
    if np.linalg.cond(C) > MAX_CONDITION:
        raise IllConditioned("congruence factor is numerically singular")
    R = C @ M @ C.T
    return 0.5 * (R + R.T)


# --------------------------------------------------------------------------
# Random sampling
# --------------------------------------------------------------------------


def random_orthogonal(dim: int, seed) -> np.ndarray:
    """Haar-distributed orthogonal matrix: QR of a Gaussian with sign fix."""
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(Z)
    return Q * np.where(np.diag(R) < 0, -1.0, 1.0)


def random_spd(dim: int, seed, lo: float = 0.1, hi: float = 10.0) -> np.ndarray:
    """Random SPD matrix ``Q diag(lambda) Q^T``, ``lambda ~ U[lo, hi]``.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts; passing a
    ``Generator`` advances it.
    """
    if dim < 1:
        raise InvalidInput("dim must be >= 1")
    if not (0 < lo <= hi):
        raise InvalidInput(f"need 0 < lo <= hi, got lo={lo}, hi={hi}")
    rng = np.random.default_rng(seed)
    lam = rng.uniform(lo, hi, size=dim)
    Q = random_orthogonal(dim, rng)
    return spectral(Q, lam)

"""
Scalar and matrix means
~~~~~~~~~~~~~~~~~~~~~~~
Power means of positive numbers, their Kubo-Ando matrix counterparts
``A^{1/2} f_p(A^{-1/2} B A^{-1/2}) A^{1/2}``, the naive matrix power mean
``((A^p + B^p) / 2)^{1/p}``, the geometric, arithmetic and min means, and the
trace divergence between arithmetic and naive power means.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInput
from .linalg import (
    EigenDecomp,
    as_symmetric,
    eig_sym,
    psd_eps,
    representing_values,
    spectral,
)

NAIVE_MIN_P = 1e-3

_KINDS = ("kubo_ando", "naive", "geometric", "arithmetic", "min")


@dataclass(frozen=True)
class MeanSpec:
    """Which matrix mean to compute.

    Use the constructors: ``MeanSpec.kubo_ando(p)``, ``MeanSpec.naive(p)``,
    ``MeanSpec.geometric()``, ``MeanSpec.arithmetic()``, ``MeanSpec.min()``.
    ``kubo_ando(0)`` is the geometric mean.
    """

    kind: str
    p: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidInput(f"unknown mean kind {self.kind!r}")
        if self.kind == "kubo_ando":
            if self.p is None or not (self.p >= 0 and math.isfinite(self.p)):
                raise InvalidInput("Kubo-Ando power mean needs a finite p >= 0")
        elif self.kind == "naive":
            if self.p is None or not (self.p >= NAIVE_MIN_P and math.isfinite(self.p)):
                raise InvalidInput(f"naive power mean needs a finite p >= {NAIVE_MIN_P}")
        elif self.p is not None:
            raise InvalidInput(f"{self.kind} mean takes no exponent")

    @classmethod
    def kubo_ando(cls, p: float) -> MeanSpec:
        return cls("kubo_ando", float(p))

    @classmethod
    def naive(cls, p: float) -> MeanSpec:
        return cls("naive", float(p))

    @classmethod
    def geometric(cls) -> MeanSpec:
        return cls("geometric")

    @classmethod
    def arithmetic(cls) -> MeanSpec:
        return cls("arithmetic")

    @classmethod
    def min(cls) -> MeanSpec:
        return cls("min")

    def label(self) -> str:
        return self.kind if self.p is None else f"{self.kind}({self.p:g})"


# --------------------------------------------------------------------------
# Scalars
# --------------------------------------------------------------------------


def scalar_power_mean(p: float, a: float, b: float) -> float:
    """``((a**p + b**p) / 2)**(1/p)``; ``p = 0`` gives ``sqrt(a*b)``."""
    if not (a > 0 and b > 0):
        raise InvalidInput(f"power mean needs a, b > 0, got {a}, {b}")
    if p == 0:
        return math.sqrt(a * b)
    # factor out a so large |p| does not overflow
    return a * float(representing_values(p, b / a))


def representing_function(p: float, t):
    """``f_p(t) = ((1 + t**p) / 2)**(1/p)`` for ``t > 0``; ``f_0(t) = sqrt(t)``.

    Accepts scalars or arrays.
    """
    arr = np.asarray(t, dtype=np.float64)
    if np.any(~(arr > 0)):
        raise InvalidInput("representing function needs t > 0")
    out = representing_values(p, arr)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Matrix means
# --------------------------------------------------------------------------


def _spd_eig(M: np.ndarray, name: str) -> EigenDecomp:
    eig = eig_sym(M)
    if eig.lambdas[-1] <= psd_eps(M):
        raise DomainError(f"{name} is not positive definite (min eigenvalue {eig.lambdas[-1]:.3e})")
    return eig


def _pair(A, B) -> tuple[np.ndarray, np.ndarray]:
    A = as_symmetric(A, name="A")
    B = as_symmetric(B, name="B")
    if A.shape != B.shape:
        raise InvalidInput(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A, B


class KuboAndoFamily:
    """Kubo-Ando power means of a fixed SPD pair, sharing one factorization.

    Computes ``A^{1/2}``, ``A^{-1/2}`` and the eigendecomposition of
    ``C = A^{-1/2} B A^{-1/2}`` once; :meth:`power` then costs two matrix
    products per exponent. ``psd_b=True`` relaxes the check on ``B`` to
    positive semidefinite.
    """

    def __init__(self, A, B, *, psd_b: bool = False):
        A, B = _pair(A, B)
        eig_a = _spd_eig(A, "A")
        if not psd_b:
            _spd_eig(B, "B")
        elif eig_sym(B).lambdas[-1] < -psd_eps(B):
            raise DomainError("B is not positive semidefinite")
        root = np.sqrt(eig_a.lambdas)
        self.sqrt_a = spectral(eig_a.Q, root)
        inv_root = spectral(eig_a.Q, 1.0 / root)
        C = inv_root @ B @ inv_root
        self.eig_c = eig_sym(0.5 * (C + C.T))
        self.lam_c = np.maximum(self.eig_c.lambdas, 0.0)

    def through(self, values: np.ndarray) -> np.ndarray:
        R = self.sqrt_a @ spectral(self.eig_c.Q, values) @ self.sqrt_a
        return 0.5 * (R + R.T)

    def power(self, p: float) -> np.ndarray:
        return self.through(representing_values(p, self.lam_c))

    def geometric(self) -> np.ndarray:
        return self.through(np.sqrt(self.lam_c))


def kubo_ando_mean(p: float, A, B) -> np.ndarray:
    """Kubo-Ando power mean ``P(p, A, B)`` of SPD matrices (``p = 0``: geometric)."""
    if not p >= 0:
        raise InvalidInput("Kubo-Ando power mean needs p >= 0")
    return KuboAndoFamily(A, B).power(p)


def geometric_mean(A, B) -> np.ndarray:
    return KuboAndoFamily(A, B).geometric()


def arithmetic_mean(A, B) -> np.ndarray:
    A, B = _pair(A, B)
    return 0.5 * (A + B)


def naive_power_mean(p: float, A, B, *, strict: bool = True) -> np.ndarray:
    """``((A^p + B^p) / 2)^{1/p}`` by direct functional calculus.

    With ``strict=False`` the inputs only need to be PSD (up to clamping),
    which the inverse solvers use to re-check their own outputs.
    """
    if not p > 0:
        raise InvalidInput("naive power mean needs p > 0")
    A, B = _pair(A, B)
    if strict:
        ea, eb = _spd_eig(A, "A"), _spd_eig(B, "B")
    else:
        ea, eb = eig_sym(A), eig_sym(B)
        for eig, M, name in ((ea, A, "A"), (eb, B, "B")):
            if eig.lambdas[-1] < -psd_eps(M):
                raise DomainError(f"{name} is not positive semidefinite")
    S = 0.5 * (
        spectral(ea.Q, np.maximum(ea.lambdas, 0.0) ** p)
        + spectral(eb.Q, np.maximum(eb.lambdas, 0.0) ** p)
    )
    es = eig_sym(S)
    return spectral(es.Q, np.maximum(es.lambdas, 0.0) ** (1.0 / p))


def min_mean(A, B) -> np.ndarray:
    """``(A + B - |A - B|) / 2`` with ``|.|`` the spectral absolute value."""
    A, B = _pair(A, B)
    D = eig_sym(A - B)
    absdiff = spectral(D.Q, np.abs(D.lambdas))
    return 0.5 * (A + B - absdiff)


def matrix_mean(spec: MeanSpec, A, B) -> np.ndarray:
    """Evaluate the mean described by ``spec`` on an SPD pair.

    Raises :class:`DomainError` if either input is not positive definite.
    """
    A, B = _pair(A, B)
    kind = spec.kind
    if kind == "kubo_ando":
        return kubo_ando_mean(spec.p, A, B)
    if kind == "geometric":
        return geometric_mean(A, B)
    if kind == "naive":
        return naive_power_mean(spec.p, A, B)
    _spd_eig(A, "A")
    _spd_eig(B, "B")
    if kind == "arithmetic":
        return arithmetic_mean(A, B)
    return min_mean(A, B)


def divergence_phi(p: float, A, B) -> float:
    """``Tr((A + B)/2 - ((A^p + B^p)/2)^{1/p})`` for ``1/2 <= p <= 1``."""
    if not (0.5 <= p <= 1):
        raise InvalidInput(f"divergence needs 1/2 <= p <= 1, got {p}")
    A, B = _pair(A, B)
    return float(np.trace(arithmetic_mean(A, B) - naive_power_mean(p, A, B)))


__all__ = [
    "MeanSpec",
    "KuboAndoFamily",
    "arithmetic_mean",
    "divergence_phi",
    "geometric_mean",
    "kubo_ando_mean",
    "matrix_mean",
    "min_mean",
    "naive_power_mean",
    "representing_function",
    "scalar_power_mean",
]

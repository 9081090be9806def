"""
Seeded verification and falsification harness
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
Randomized Loewner-order checks for the mean inequalities, operator
monotonicity searches, and the characterization experiments that pair them.

Sample ``i`` of a run draws from ``default_rng([seed, stream, i])``, so each
sample is reproducible on its own and results do not depend on how samples
are spread over threads. A run reports the violation with the smallest
sample index. Set ``MEANLAB_THREADS`` (or pass ``threads``) to evaluate
samples concurrently.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidInput, MeanLabError
from .inverse import (
    chain_decompose,
    chain_solve_global,
    chain_solve_sqrt,
    solve_arith_power_local,
    solve_geom_power,
)
from .linalg import (
    LoewnerResult,
    ScalarFunction,
    apply_fun,
    eig_sym,
    loewner_leq,
    random_spd,
)
from .means import (
    KuboAndoFamily,
    arithmetic_mean,
    min_mean,
    naive_power_mean,
)
from .scalar_solvers import gamma_of

DEFAULT_TOL = 1e-9
HOLDS = "holds-on-samples"
VIOLATED = "violated"

# stream ids keep the sample sequences of different experiments apart
_MEANS, _MONO, _CHAR, _NAIVE = 1, 2, 3, 4

CANONICAL_A = np.array([[1.0, 1.0], [1.0, 1.0]])
CANONICAL_B = np.array([[2.0, 1.0], [1.0, 1.0]])


@dataclass
class Witness:
    """A failed comparison ``lhs <= rhs`` together with the inputs that produced it."""

    label: str
    A: np.ndarray
    B: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    eigenvalue: float
    vector: np.ndarray
    sample: int
    seed: int

    def recheck(self, tol: float = DEFAULT_TOL) -> LoewnerResult:
        return loewner_leq(self.lhs, self.rhs, tol)


@dataclass
class Verdict:
    status: str
    samples_run: int
    witness: Witness | None = None
    note: str = ""

    @property
    def violated(self) -> bool:
        return self.status == VIOLATED

    def __bool__(self) -> bool:
        return not self.violated


@dataclass(frozen=True)
class Hypothesis:
    """One inequality ``f(lhs(A, B)) <= f(rhs(A, B))`` between two means.

    Kinds: ``geom-vs-power`` (p), ``power-vs-arith`` (p), ``arith-vs-power``
    (q), ``naive-vs-arith`` (p), ``arith-vs-naive`` (q), ``reverse-agm``.
    """

    kind: str
    param: float | None = None

    KINDS = (
        "geom-vs-power",
        "power-vs-arith",
        "arith-vs-power",
        "naive-vs-arith",
        "arith-vs-naive",
        "reverse-agm",
    )

    def __post_init__(self):
        k, t = self.kind, self.param
        if k not in self.KINDS:
            raise InvalidInput(f"unknown hypothesis {k!r}")
        if k == "reverse-agm":
            if t is not None:
                raise InvalidInput("reverse-agm takes no parameter")
        elif t is None:
            raise InvalidInput(f"{k} needs a parameter")
        elif k in ("geom-vs-power", "power-vs-arith") and not 0 < t <= 1:
            raise InvalidInput(f"{k} needs 0 < p <= 1")
        elif k == "naive-vs-arith" and not 0.5 <= t <= 1:
            raise InvalidInput(f"{k} needs 1/2 <= p <= 1")
        elif k in ("arith-vs-power", "arith-vs-naive") and not t >= 1:
            raise InvalidInput(f"{k} needs q >= 1")

    @classmethod
    def parse(cls, text: str) -> Hypothesis:
        name, _, arg = text.strip().lower().partition(":")
        try:
            return cls(name, float(arg) if arg else None)
        except ValueError:
            raise InvalidInput(f"bad hypothesis parameter {arg!r}") from None

    def label(self) -> str:
        return self.kind if self.param is None else f"{self.kind}:{self.param:g}"

    @property
    def characterizes(self) -> bool:
        """Whether the inequality holding for all pairs forces operator monotonicity.

        True for the Kubo-Ando inequalities with a non-trivial exponent and
        for the reverse AGM inequality. At ``p = 1`` / ``q = 1`` both sides
        coincide and the inequality holds for every ``f``.
        """
        if self.kind in ("geom-vs-power", "reverse-agm"):
            return True
        if self.kind == "power-vs-arith":
            return self.param < 1
        if self.kind == "arith-vs-power":
            return self.param > 1
        return False

    def sides(self, A, B) -> tuple[np.ndarray, np.ndarray]:
        k, t = self.kind, self.param
        if k == "geom-vs-power":
            fam = KuboAndoFamily(A, B)
            return fam.geometric(), fam.power(t)
        if k == "power-vs-arith":
            return KuboAndoFamily(A, B).power(t), arithmetic_mean(A, B)
        if k == "arith-vs-power":
            return arithmetic_mean(A, B), KuboAndoFamily(A, B).power(t)
        if k == "naive-vs-arith":
            return naive_power_mean(t, A, B), arithmetic_mean(A, B)
        if k == "arith-vs-naive":
            return arithmetic_mean(A, B), naive_power_mean(t, A, B)
        return min_mean(A, B), KuboAndoFamily(A, B).geometric()


# --------------------------------------------------------------------------
# sampling and scanning
# --------------------------------------------------------------------------


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        raw = os.environ.get("MEANLAB_THREADS", "1")
        try:
            threads = int(raw)
        except ValueError:
            raise InvalidInput(f"MEANLAB_THREADS must be an integer, got {raw!r}") from None
    if threads < 1:
        raise InvalidInput("thread count must be >= 1")
    return threads


def _dims(dim: int | Sequence[int]) -> tuple[int, ...]:
    dims = (dim,) if np.isscalar(dim) else tuple(dim)
    if not dims or any(int(d) != d or d < 1 for d in dims):
        raise InvalidInput(f"dimensions must be positive integers, got {dim!r}")
    return tuple(int(d) for d in dims)


def _check_counts(samples: int, seed: int) -> None:
    if samples < 1:
        raise InvalidInput("samples must be >= 1")
    if seed < 0:
        raise InvalidInput("seed must be non-negative")


def _rng(seed: int, stream: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream, index])


def random_spd_pair(dim: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Two independent SPD matrices with log-uniform spectral ranges.

    Every fourth draw (on average) makes ``B`` a small perturbation of ``A``
    to exercise the near-equality regime.
    """
    lo = 10.0 ** rng.uniform(-1.0, 0.0)
    hi = lo * 10.0 ** rng.uniform(0.0, 2.0)
    A = random_spd(dim, rng, lo, hi)
    if rng.random() < 0.25:
        E = random_spd(dim, rng, 1.0, 2.0) - 1.5 * np.eye(dim)
        B = A + 10.0 ** rng.uniform(-6, -2) * lo * E
        return A, 0.5 * (B + B.T)
    return A, random_spd(dim, rng, lo, hi)


def random_ordered_pair(dim: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``A`` random SPD and ``B = A + s L^T L`` with ``||B|| <= 10 ||A||``.

    ``L`` has a random number of rows, so the perturbation has random rank;
    its size is log-uniform between ``1e-6`` and ``9`` times ``||A||``.
    """
    lo = 10.0 ** rng.uniform(-1.0, 0.0)
    hi = lo * 10.0 ** rng.uniform(0.0, 2.0)
    A = random_spd(dim, rng, lo, hi)
    rank = int(rng.integers(1, dim + 1))
    L = rng.standard_normal((rank, dim))
    P = L.T @ L
    norm_a = float(eig_sym(A).lambdas[0])
    norm_p = float(eig_sym(P).lambdas[0])
    scale = 10.0 ** rng.uniform(-6.0, np.log10(9.0)) * norm_a / norm_p
    B = A + scale * P
    return A, 0.5 * (B + B.T)


def canonical_witness(dim: int, scale: float) -> tuple[np.ndarray, np.ndarray]:
    """``scale * [[1,1],[1,1]] <= scale * [[2,1],[1,1]]``, padded with the identity."""
    A, B = np.eye(dim), np.eye(dim)
    A[:2, :2] = scale * CANONICAL_A
    B[:2, :2] = scale * CANONICAL_B
    return A, B


Evaluator = Callable[[int], Sequence["Witness | None"]]


def _scan(samples: int, evaluate: Evaluator, n_checks: int, threads: int, stop_early: bool):
    """Run ``evaluate`` over sample indices; keep the first witness per check.

    Returns ``(samples_run, witnesses)``. With ``stop_early`` the scan ends at
    the first sample that violates anything and ``samples_run`` counts up to
    and including it.
    """
    first: list[Witness | None] = [None] * n_checks
    chunk = max(1, threads * 8)
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for start in range(0, samples, chunk):
            idx = range(start, min(samples, start + chunk))
            results = pool.map(evaluate, idx) if pool else map(evaluate, idx)
            for i, found in zip(idx, results):
                hit = False
                for k, w in enumerate(found):
                    if w is not None:
                        hit = True
                        if first[k] is None:
                            first[k] = w
                if hit and stop_early:
                    return i + 1, first
    finally:
        if pool:
            pool.shutdown()
    return samples, first


def _compare(label, A, B, lhs, rhs, tol, index, seed) -> Witness | None:
    res = loewner_leq(lhs, rhs, tol)
    if res:
        return None
    return Witness(label, A, B, lhs, rhs, res.eigenvalue, res.vector, index, seed)


def _verdict(samples_run: int, witness: Witness | None, note: str = "") -> Verdict:
    return Verdict(VIOLATED if witness else HOLDS, samples_run, witness, note)


# --------------------------------------------------------------------------
# experiments
# --------------------------------------------------------------------------


def check_mean_inequalities(
    p: float,
    q: float,
    dim: int | Sequence[int],
    samples: int,
    seed: int,
    tol: float = DEFAULT_TOL,
    threads: int | None = None,
) -> Verdict:
    """Check both mean chains on random SPD pairs.

    Kubo-Ando chain: ``A # B <= P(p) <= (A + B)/2 <= P(q)``. Naive chain (only
    when ``p >= 1/2``): ``N(p) <= (A + B)/2 <= N(q)``. Each ``<=`` is a
    :func:`loewner_leq` test at ``tol``.
    """
    if not 0 < p <= 1 <= q:
        raise InvalidInput(f"need 0 < p <= 1 <= q, got p={p}, q={q}")
    _check_counts(samples, seed)
    dims = _dims(dim)
    naive = p >= 0.5

    def evaluate(i):
        rng = _rng(seed, _MEANS, i)
        A, B = random_spd_pair(dims[i % len(dims)], rng)
        fam = KuboAndoFamily(A, B)
        G, Pp, Pq = fam.geometric(), fam.power(p), fam.power(q)
        M = arithmetic_mean(A, B)
        pairs = [("geom<=power_p", G, Pp), ("power_p<=arith", Pp, M), ("arith<=power_q", M, Pq)]
        if naive:
            pairs += [
                ("naive_p<=arith", naive_power_mean(p, A, B), M),
                ("arith<=naive_q", M, naive_power_mean(q, A, B)),
            ]
        for label, lhs, rhs in pairs:
            w = _compare(label, A, B, lhs, rhs, tol, i, seed)
            if w:
                return (w,)
        return (None,)

    run, (w,) = _scan(samples, evaluate, 1, resolve_threads(threads), True)
    return _verdict(run, w, "" if naive else "naive chain skipped (p < 1/2)")


def _monotonicity_evaluator(f: ScalarFunction, dims, seed, tol, stream=_MONO):
    inject = f.kind == "power" and f.param > 1

    def evaluate(i):
        rng = _rng(seed, stream, i)
        d = dims[i % len(dims)]
        if i == 0 and inject and d >= 2:
            A, B = canonical_witness(d, float(np.exp(rng.uniform(-1.0, 1.0))))
        else:
            A, B = random_ordered_pair(d, rng)
        return (_compare(f"f(A)<=f(B) [{f.label()}]", A, B, apply_fun(A, f), apply_fun(B, f), tol, i, seed),)

    return evaluate


def test_monotonicity(
    f: ScalarFunction,
    dim: int | Sequence[int],
    samples: int,
    seed: int,
    tol: float = DEFAULT_TOL,
    threads: int | None = None,
) -> Verdict:
    """Search for ``A <= B`` with ``f(A) <= f(B)`` failing.

    For ``f = t**r`` with ``r > 1`` sample 0 is the scaled canonical pair
    ``[[1,1],[1,1]] <= [[2,1],[1,1]]``, so a violation is always found when
    some dimension is at least 2.
    """
    _check_counts(samples, seed)
    dims = _dims(dim)
    evaluate = _monotonicity_evaluator(f, dims, seed, tol)
    run, (w,) = _scan(samples, evaluate, 1, resolve_threads(threads), True)
    return _verdict(run, w)


test_monotonicity.__test__ = False  # not a pytest test despite the name


@dataclass
class CharacterizationReport:
    function: str
    hypothesis: str
    inequality: Verdict
    monotonicity: Verdict
    consistent: bool
    injected: int


def _counterexample_pairs(hyp: Hypothesis, X, Y) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairs ``(A, B)`` whose two means telescope from ``X`` to ``Y``.

    Built with the inverse solvers, so that if ``f(X) <= f(Y)`` fails then
    ``f(lhs) <= f(rhs)`` must fail on at least one of the returned pairs.
    """
    k, t = hyp.kind, hyp.param
    if k == "geom-vs-power":
        s = solve_geom_power(t, X, Y)
        return [(s.A, s.B)]
    if k == "arith-vs-power" and t > 1:
        w = chain_solve_global(t, X, Y)
        return [(link.solution.A, link.solution.B) for link in w.links]
    if k == "power-vs-arith" and t < 1:
        # (A + B)/2 = Z_{k+1} and P(p, A, B) = Z_k along an increasing chain
        w = chain_decompose(X, Y, 0.5 * (1.0 + 1.0 / gamma_of(t)))
        out = []
        for z0, z1 in zip(w.Zs, w.Zs[1:]):
            s = solve_arith_power_local(t, z1, z0)
            out.append((s.A, s.B))
        return out
    if k == "naive-vs-arith" and t == 0.5:
        # ((A^{1/2} + B^{1/2})/2)^2 = Z_k and (A + B)/2 = Z_{k+1}
        w = chain_solve_sqrt(X, Y)
        return [(link.solution.A, link.solution.B) for link in w.links]
    return []


def _injected_pairs(hyp, f, mono: Verdict, tol) -> list[tuple[np.ndarray, np.ndarray]]:
    if not mono.violated:
        return []
    X, Y = mono.witness.A, mono.witness.B
    # solvers need X > 0; a small shift keeps the violation
    shift = 0.01 * float(np.max(np.abs(X)))
    Xs, Ys = X + shift * np.eye(len(X)), Y + shift * np.eye(len(Y))
    if loewner_leq(apply_fun(Xs, f), apply_fun(Ys, f), tol):
        Xs, Ys = X, Y
    try:
        return _counterexample_pairs(hyp, Xs, Ys)
    except MeanLabError:
        return []


def test_characterization(
    f: ScalarFunction,
    hyp: Hypothesis,
    dim: int | Sequence[int],
    samples: int,
    seed: int,
    tol: float = DEFAULT_TOL,
    threads: int | None = None,
) -> CharacterizationReport:
    """Test ``f(lhs) <= f(rhs)`` for one hypothesis alongside operator monotonicity of ``f``.

    When the monotonicity search finds ``X <= Y`` with ``f(X) <= f(Y)`` failing,
    the inequality search starts with pairs built from ``(X, Y)`` by the
    inverse solvers, which must expose a violation whenever the hypothesis
    characterizes operator monotonicity. ``consistent`` is false only for a
    characterizing hypothesis whose inequality held on every sample while
    monotonicity failed.
    """
    _check_counts(samples, seed)
    dims = _dims(dim)
    threads = resolve_threads(threads)
    mono = test_monotonicity(f, dims, samples, seed, tol, threads)
    injected = _injected_pairs(hyp, f, mono, tol)
    n_inj = len(injected)

    def evaluate(i):
        if i < n_inj:
            A, B = injected[i]
        else:
            rng = _rng(seed, _CHAR, i - n_inj)
            A, B = random_spd_pair(dims[(i - n_inj) % len(dims)], rng)
        lhs, rhs = hyp.sides(A, B)
        label = f"f(lhs)<=f(rhs) [{hyp.label()}, {f.label()}]"
        return (_compare(label, A, B, apply_fun(lhs, f), apply_fun(rhs, f), tol, i, seed),)

    run, (w,) = _scan(samples + n_inj, evaluate, 1, threads, True)
    note = "" if w else "no violation within the sample budget (evidence, not proof)"
    ineq = _verdict(run, w, note)
    consistent = not (hyp.characterizes and not ineq.violated and mono.violated)
    return CharacterizationReport(f.label(), hyp.label(), ineq, mono, consistent, n_inj)


test_characterization.__test__ = False


@dataclass
class NaiveCounterexampleReport:
    q: float
    r: float
    links: tuple[Verdict, Verdict, Verdict]
    monotonicity: Verdict

    @property
    def demonstrated(self) -> bool:
        """All three links hold while ``t**r`` is shown not operator monotone."""
        return all(not v.violated for v in self.links) and self.monotonicity.violated


NAIVE_CHAIN_LINKS = (
    "((A+B)/2)^r <= (A^r+B^r)/2",
    "(A^r+B^r)/2 <= ((A^q+B^q)/2)^(r/q)",
    "((A^q+B^q)/2)^(r/q) <= [((A^q+B^q)/2)^(1/q)]^r",
)


def prop31_counterexample(
    q: float,
    r: float,
    dim: int | Sequence[int],
    samples: int,
    seed: int,
    tol: float = DEFAULT_TOL,
    threads: int | None = None,
) -> NaiveCounterexampleReport:
    """``f(t) = t**r`` with ``1 < r <= min(2, q)`` satisfies the naive inequality but is not operator monotone.

    Checks the three-step chain
    ``((A+B)/2)^r <= (A^r+B^r)/2 <= ((A^q+B^q)/2)^{r/q} <= [((A^q+B^q)/2)^{1/q}]^r``
    on every sample and runs :func:`test_monotonicity` on ``t**r``.
    """
    if not (q > 1 and 1 < r <= min(2.0, q)):
        raise InvalidInput(f"need q > 1 and 1 < r <= min(2, q), got q={q}, r={r}")
    _check_counts(samples, seed)
    dims = _dims(dim)
    threads = resolve_threads(threads)

    def evaluate(i):
        rng = _rng(seed, _NAIVE, i)
        A, B = random_spd_pair(dims[i % len(dims)], rng)
        ea, eb = eig_sym(A), eig_sym(B)
        Ar, Br = ea.compose(ea.lambdas**r), eb.compose(eb.lambdas**r)
        Sq = 0.5 * (ea.compose(ea.lambdas**q) + eb.compose(eb.lambdas**q))
        es = eig_sym(Sq)
        lam = np.maximum(es.lambdas, 0.0)
        m1 = apply_fun(arithmetic_mean(A, B), ScalarFunction.power(r))
        m2 = 0.5 * (Ar + Br)
        m3 = es.compose(lam ** (r / q))
        nq = es.compose(lam ** (1.0 / q))
        m4 = apply_fun(nq, ScalarFunction.power(r))
        sides = ((m1, m2), (m2, m3), (m3, m4))
        return tuple(
            _compare(label, A, B, lhs, rhs, tol, i, seed)
            for label, (lhs, rhs) in zip(NAIVE_CHAIN_LINKS, sides)
        )

    run, ws = _scan(samples, evaluate, 3, threads, False)
    links = tuple(_verdict(run, w) for w in ws)
    mono = test_monotonicity(ScalarFunction.power(r), dims, samples, seed, tol, threads)
    return NaiveCounterexampleReport(float(q), float(r), links, mono)

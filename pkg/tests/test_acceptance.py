"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line through the ``report``
fixture; the lines are repeated in the terminal summary.
"""
import json
import math
import time

import numpy as np
import pytest

from conftest import congruent_pair, maxabs
from meanlab.cli import run_command
from meanlab.inverse import (
    chain_decompose,
    chain_solve_global,
    solve_arith_power_local,
    solve_arith_quadratic,
    solve_geom_power,
    solve_sqrt_arith,
)
from meanlab.linalg import ScalarFunction, is_spd, loewner_leq, random_spd
from meanlab.means import (
    arithmetic_mean,
    geometric_mean,
    kubo_ando_mean,
    naive_power_mean,
)
from meanlab.scalar_solvers import gamma_of, invert_h, invert_phi
from meanlab.verify import check_mean_inequalities, prop31_counterexample
from meanlab.verify import test_monotonicity as monotonicity
from test_cli import GOLDEN, GOLDEN_CASES, assert_close, strip_timing

pytestmark = pytest.mark.acceptance

DIMS = range(1, 9)
LOEWNER_TOL = 1e-9
RESIDUAL_RTOL = 1e-8


def rng_for(*key):
    return np.random.default_rng(list(key))


# -- criterion 1 -------------------------------------------------------------


def test_mean_chains(report):
    t0 = time.perf_counter()
    failures = []
    for p in (0.25, 0.5, 0.75, 1.0):
        for q in (1.0, 1.5, 2.0, 3.0):
            v = check_mean_inequalities(p, q, DIMS, 500, 2024, tol=LOEWNER_TOL)
            if v.violated or v.samples_run != 500:
                failures.append((p, q, v.witness.label if v.witness else None))
    elapsed = time.perf_counter() - t0
    report(1, "mean-chain suite", not failures and elapsed < 60, f"16 x 500 samples, {elapsed:.1f}s, failures={failures}")


# -- criterion 2 -------------------------------------------------------------


def _instance(kind, i):
    rng = rng_for(2, list(SOLVERS).index(kind), i)
    dim = int(rng.integers(1, 9))
    X = random_spd(dim, rng, 0.1, 10.0)
    if kind == "geom-power":
        p = float(rng.uniform(0.05, 1.0))
        X, Y = congruent_pair(X, random_spd(dim, rng, 1.0, 50.0))
        return (p, X, Y), lambda A, B: (geometric_mean(A, B), kubo_ando_mean(p, A, B))
    if kind == "arith-power":
        # both directions: r > 1 with X <= Y < gamma X, r < 1 with gamma X < Y <= X
        r = float(rng.uniform(1.1, 4.0)) if i % 2 == 0 else float(rng.uniform(0.3, 0.95))
        lo, hi = sorted((1.0, gamma_of(r)))
        X, Y = congruent_pair(X, random_spd(dim, rng, lo + 1e-6, hi - 1e-6))
        return (r, X, Y), lambda A, B: (arithmetic_mean(A, B), kubo_ando_mean(r, A, B))
    if kind == "sqrt-arith":
        X, Y = congruent_pair(X, random_spd(dim, rng, 1.0, 1.999))
        return (X, Y), lambda A, B: (naive_power_mean(0.5, A, B), arithmetic_mean(A, B))
    X2 = X @ X
    _, Y2 = congruent_pair(X2, random_spd(dim, rng, 1.0, 1.999))
    w, V = np.linalg.eigh(Y2)
    Y = (V * np.sqrt(w)) @ V.T
    return (X, 0.5 * (Y + Y.T)), lambda A, B: (arithmetic_mean(A, B), naive_power_mean(2.0, A, B))


SOLVERS = {
    "geom-power": solve_geom_power,
    "arith-power": solve_arith_power_local,
    "sqrt-arith": solve_sqrt_arith,
    "arith-quadratic": solve_arith_quadratic,
}


@pytest.mark.parametrize("kind", list(SOLVERS))
def test_inverse_round_trips(report, kind):
    solver = SOLVERS[kind]
    t0 = time.perf_counter()
    worst, bad = 0.0, []
    for i in range(200):
        args, means = _instance(kind, i)
        X, Y = args[-2], args[-1]
        sol = solver(*args)
        # recompute both means independently of the solver's own bookkeeping
        mX, mY = means(sol.A, sol.B)
        scale = 1.0 + maxabs(X) + maxabs(Y)
        rel = max(maxabs(mX - X), maxabs(mY - Y)) / scale
        worst = max(worst, rel)
        if not (rel <= RESIDUAL_RTOL and sol.certified and is_spd(sol.A) and is_spd(sol.B)):
            bad.append(i)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 30
    report(2, f"inverse round-trips [{kind}]", ok, f"200 instances, worst rel residual {worst:.2e}, {elapsed:.1f}s, failing={bad[:5]}")


# -- criterion 3 -------------------------------------------------------------


def test_chain_decomposition(report):
    gamma0 = (1 + math.sqrt(2)) / 2
    problems = []
    for i in range(100):
        rng = rng_for(3, i)
        dim = int(rng.integers(2, 7))
        X = random_spd(dim, rng, 0.1, 10.0)
        cond = 10 ** rng.uniform(0.0, 3.0)
        X, Y = congruent_pair(X, random_spd(dim, rng, 1.0, cond))
        w = chain_decompose(X, Y, gamma0)
        if maxabs(w.Zs[0] - X) > 1e-10 or maxabs(w.Zs[-1] - Y) > 1e-10:
            problems.append((i, "endpoints"))
        for a, b in zip(w.Zs, w.Zs[1:]):
            if not (loewner_leq(a, b, LOEWNER_TOL) and loewner_leq(b, gamma0 * a, LOEWNER_TOL)):
                problems.append((i, "link order"))
                break
        solved = chain_solve_global(2, X, Y)
        if solved.gamma0 != gamma0 or not solved.solved:
            problems.append((i, "solve"))

    hand = chain_decompose(np.eye(2), np.diag([1.9, 1.1]), 1.2)
    expected = [np.diag(d) for d in ([1, 1], [1, 1.1], [1.2, 1.1], [1.44, 1.1], [1.728, 1.1], [1.9, 1.1])]
    hand_ok = len(hand) == 6 and all(maxabs(Z - E) <= 1e-10 for Z, E in zip(hand.Zs, expected))
    report(3, "chain decomposition", not problems and hand_ok, f"100 chains, problems={problems[:5]}, hand example={'ok' if hand_ok else 'MISMATCH'}")


# -- criterion 4 -------------------------------------------------------------


def _diag_instance(i):
    rng = rng_for(4, i)
    n = int(rng.integers(1, 9))
    return rng, n, rng.uniform(0.1, 10.0, n)


def _scalar_checks():
    """Yield (solver name, solution, expected diag of A, expected diag of B) on diagonal inputs."""
    for i in range(100):
        rng, n, x = _diag_instance(i)
        p = float(rng.uniform(0.05, 1.0))
        lam = rng.uniform(1.0, 50.0, n)
        s = solve_geom_power(p, np.diag(x), np.diag(x * lam))
        a = np.array([invert_h(p, float(v)).value for v in lam])
        yield "geom-power", s, x * a, x / a

        r = float(rng.uniform(1.1, 4.0))
        lam = rng.uniform(1.0, gamma_of(r) - 1e-6, n)
        s = solve_arith_power_local(r, np.diag(x), np.diag(x * lam))
        d = np.array([invert_phi(r, float(v)).value for v in lam])
        yield "arith-power", s, x * d, x * (2 - d)

        # sqrt-arith: scale y, arithmetic mean 1, half-power mean x/y = phi_{1/2}(d)
        y = x * rng.uniform(1.0, 1.999, n)
        s = solve_sqrt_arith(np.diag(x), np.diag(y))
        d = np.array([invert_phi(0.5, float(v)).value for v in x / y])
        yield "sqrt-arith", s, y * d, y * (2 - d)

        # arith-quadratic: scale x, quadratic mean y/x = phi_2(d)
        y = x * np.sqrt(rng.uniform(1.0, 1.999, n))
        s = solve_arith_quadratic(np.diag(x), np.diag(y))
        d = np.array([invert_phi(2.0, float(v)).value for v in y / x])
        yield "arith-quadratic", s, x * d, x * (2 - d)


def test_scalar_equivalence(report):
    worst = {}
    for name, sol, a, b in _scalar_checks():
        scale = max(maxabs(a), maxabs(b))
        err = max(maxabs(sol.A - np.diag(a)), maxabs(sol.B - np.diag(b))) / scale
        worst[name] = max(worst.get(name, 0.0), err)
    ok = len(worst) == 4 and all(v <= 1e-10 for v in worst.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(4, "scalar oracle equivalence", ok, f"100 diagonal instances each, worst rel error: {detail}")


# -- criterion 5 -------------------------------------------------------------


def test_sqrt_arith_closed_form(report):
    sol = solve_sqrt_arith([[1.0]], [[1.5]])
    a, b = sol.A[0, 0], sol.B[0, 0]
    ok = abs(a - 2.9142136) <= 1e-6 and abs(b - 0.0857864) <= 1e-6
    ok = ok and sol.residual_X <= 1e-10 and sol.residual_Y <= 1e-10
    report(5, "closed-form check", ok, f"A={a:.10f}, B={b:.10f}, residuals {sol.residual_X:.1e}/{sol.residual_Y:.1e}")


# -- criterion 6 -------------------------------------------------------------


def test_monotonicity_lab(report):
    t0 = time.perf_counter()
    square = monotonicity(ScalarFunction.power(2), 2, 1000, 6)
    ok = square.violated
    detail = []
    if ok:
        w = square.witness
        rechecked = w.recheck()
        diff_min = float(np.linalg.eigvalsh(w.B @ w.B - w.A @ w.A).min())
        ok = (not rechecked) and rechecked.eigenvalue <= -1e-6 and diff_min <= -1e-6
        detail.append(f"power:2 violated at sample {w.sample}, min eig of B^2-A^2 {diff_min:.3e}")
    for name in ("sqrt", "ratio", "log1p", "power:0.5"):
        v = monotonicity(ScalarFunction.parse(name), DIMS, 1000, 6)
        good = not v.violated and v.samples_run == 1000
        ok = ok and good
        detail.append(f"{name} {'holds' if good else 'VIOLATED'}")
    elapsed = time.perf_counter() - t0
    report(6, "monotonicity lab", ok and elapsed < 60, f"{'; '.join(detail)}; {elapsed:.1f}s")


# -- criterion 7 -------------------------------------------------------------


def test_naive_inequality_counterexample(report):
    t0 = time.perf_counter()
    parts, ok = [], True
    for q, r in ((2.0, 2.0), (4.0, 1.5)):
        rep = prop31_counterexample(q, r, range(2, 9), 500, 7)
        links_hold = all(not v.violated and v.samples_run == 500 for v in rep.links)
        ok = ok and links_hold and rep.monotonicity.violated and rep.demonstrated
        parts.append(f"(q={q:g}, r={r:g}) links {'hold' if links_hold else 'FAIL'}, t^r monotone violated={rep.monotonicity.violated}")
    elapsed = time.perf_counter() - t0
    report(7, "naive-inequality counterexample report", ok and elapsed < 60, f"{'; '.join(parts)}; {elapsed:.1f}s")


# -- criterion 8 -------------------------------------------------------------


def test_geometric_limit(report):
    worst = 0.0
    for i in range(100):
        rng = rng_for(8, i)
        dim = int(rng.integers(1, 9))
        A, B = random_spd(dim, rng, 0.01, 100.0), random_spd(dim, rng, 0.01, 100.0)
        G = geometric_mean(A, B)
        worst = max(worst, maxabs(kubo_ando_mean(1e-6, A, B) - G) / (1 + maxabs(G)))
    report(8, "small-p limit", worst <= 1e-4, f"100 pairs, worst {worst:.2e} (bound 1e-4)")


# -- criterion 9 -------------------------------------------------------------


def test_cli_contract(report):
    problems = []
    for name, (argv, expected_code) in sorted(GOLDEN_CASES.items()):
        code, rep = run_command(argv)
        if code != expected_code:
            problems.append(f"{name}: exit {code} != {expected_code}")
            continue
        text = json.dumps(rep)
        if json.loads(text) != rep:
            problems.append(f"{name}: re-parse differs")
        try:
            golden = json.loads((GOLDEN / f"{name}.json").read_text())
            assert_close(strip_timing(json.loads(text)), golden)
        except AssertionError as exc:
            problems.append(f"{name}: golden mismatch at {exc}")
    code, rep = run_command(["mean", "--no-such-flag"])
    if code != 2 or rep is not None:
        problems.append("usage error exit code")
    report(9, "CLI contract", not problems, f"{len(GOLDEN_CASES)} goldens; problems={problems}")

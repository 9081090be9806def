import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import maxabs, spd_with_spectrum
from meanlab.errors import DomainError, InvalidInput
from meanlab.linalg import loewner_leq, random_orthogonal, random_spd
from meanlab.means import (
    KuboAndoFamily,
    MeanSpec,
    divergence_phi,
    geometric_mean,
    kubo_ando_mean,
    matrix_mean,
    min_mean,
    naive_power_mean,
    representing_function,
    scalar_power_mean,
)

ALL_SPECS = [
    MeanSpec.kubo_ando(0.5),
    MeanSpec.kubo_ando(2.0),
    MeanSpec.geometric(),
    MeanSpec.arithmetic(),
    MeanSpec.min(),
    MeanSpec.naive(0.75),
    MeanSpec.naive(3.0),
]


def scipy_kubo_ando(p, A, B):
    """Independent oracle built from scipy's Schur-based matrix functions."""
    Ah = np.real(scipy.linalg.sqrtm(A))
    Aih = np.linalg.inv(Ah)
    C = Aih @ B @ Aih
    C = 0.5 * (C + C.T)
    if p == 0:
        F = np.real(scipy.linalg.sqrtm(C))
    else:
        inner = 0.5 * (np.eye(len(A)) + np.real(scipy.linalg.fractional_matrix_power(C, p)))
        F = np.real(scipy.linalg.fractional_matrix_power(inner, 1.0 / p))
    return Ah @ F @ Ah


def pair(seed, dim=4, lo=0.2, hi=5.0):
    rng = np.random.default_rng(seed)
    return random_spd(dim, rng, lo, hi), random_spd(dim, rng, lo, hi)


class TestScalar:
    def test_examples(self):
        assert scalar_power_mean(2, 1, 7) == pytest.approx(5.0, rel=1e-15)
        assert scalar_power_mean(1, 3.0, 8.0) == pytest.approx(5.5, rel=1e-15)
        assert scalar_power_mean(0, 4, 9) == 6.0

    def test_representing_examples(self):
        assert representing_function(1, 3.0) == pytest.approx(2.0, rel=1e-15)
        assert representing_function(2, 7.0) == pytest.approx(5.0, rel=1e-15)
        assert representing_function(0, 4.0) == 2.0

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(0.01, 4.0),
        st.floats(1e-3, 1e3),
    )
    def test_representing_properties(self, p, t):
        assert representing_function(p, 1.0) == pytest.approx(1.0, abs=1e-15)
        assert t * representing_function(p, 1.0 / t) == pytest.approx(representing_function(p, t), rel=1e-12)
        # direct formula agrees away from overflow
        assert representing_function(p, t) == pytest.approx(((1 + t**p) / 2) ** (1 / p), rel=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(-3, 3), st.floats(0, 2))
    def test_monotone_in_p(self, a, b, p, dp):
        assert scalar_power_mean(p, a, b) <= scalar_power_mean(p + dp, a, b) * (1 + 1e-12)

    @pytest.mark.parametrize("p", [5e-324, -5e-324, 1e-300, 1e-20, -1e-12])
    def test_tiny_p_matches_series(self, p):
        # log of the mean is log(ab)/2 + p (log(b/a))^2 / 8 + O(p^3)
        a, b = 0.125, 84.0
        want = math.exp(0.5 * math.log(a * b) + p * math.log(b / a) ** 2 / 8)
        assert scalar_power_mean(p, a, b) == pytest.approx(want, rel=1e-14)

    @pytest.mark.parametrize("a,b", [(0.0, 1.0), (-1.0, 2.0), (1.0, 0.0)])
    def test_invalid(self, a, b):
        with pytest.raises(InvalidInput):
            scalar_power_mean(1.0, a, b)

    def test_representing_invalid(self):
        with pytest.raises(InvalidInput):
            representing_function(1.0, [1.0, 0.0])


class TestMatrixMeanExamples:
    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label())
    def test_idempotent(self, spec):
        A = random_spd(5, 1, 0.1, 10)
        assert maxabs(matrix_mean(spec, A, A) - A) <= 1e-10 * (1 + maxabs(A))

    def test_geometric_commuting(self):
        G = matrix_mean(MeanSpec.geometric(), np.diag([4.0, 1.0]), np.diag([9.0, 1.0]))
        np.testing.assert_allclose(G, np.diag([6.0, 1.0]), atol=1e-13)

    def test_power_one_by_one(self):
        np.testing.assert_allclose(matrix_mean(MeanSpec.kubo_ando(2), [[1.0]], [[7.0]]), [[5.0]], rtol=1e-14)

    def test_min_mean_commuting(self):
        M = matrix_mean(MeanSpec.min(), np.diag([1.0, 5.0]), np.diag([3.0, 2.0]))
        np.testing.assert_allclose(M, np.diag([1.0, 2.0]), atol=1e-14)

    def test_kubo_ando_zero_is_geometric(self):
        A, B = pair(3)
        assert maxabs(kubo_ando_mean(0, A, B) - geometric_mean(A, B)) <= 1e-14 * maxabs(A)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label())
    def test_non_spd_rejected(self, spec):
        with pytest.raises(DomainError):
            matrix_mean(spec, np.diag([1.0, 0.0]), np.eye(2))

    def test_invalid_specs(self):
        with pytest.raises(InvalidInput):
            MeanSpec.kubo_ando(-0.1)
        with pytest.raises(InvalidInput):
            MeanSpec.naive(1e-4)


class TestOracles:
    @pytest.mark.parametrize("p", [0.0, 0.25, 0.5, 1.0, 1.5, 3.0])
    @pytest.mark.parametrize("seed", range(4))
    def test_kubo_ando_matches_scipy(self, p, seed):
        A, B = pair(seed, dim=5)
        ours = kubo_ando_mean(p, A, B)
        assert maxabs(ours - scipy_kubo_ando(p, A, B)) <= 1e-9 * (1 + maxabs(ours))

    @pytest.mark.parametrize("seed", range(6))
    def test_geometric_solves_riccati(self, seed):
        # G A^{-1} G = B characterizes A # B among SPD matrices
        A, B = pair(seed, dim=6, lo=0.05, hi=20)
        G = geometric_mean(A, B)
        assert maxabs(G @ np.linalg.solve(A, G) - B) <= 1e-9 * (1 + maxabs(B))
        assert np.linalg.eigvalsh(G).min() > 0

    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.5])
    def test_naive_matches_scipy(self, p):
        A, B = pair(10, dim=4)
        fp = scipy.linalg.fractional_matrix_power
        expected = np.real(fp(0.5 * (np.real(fp(A, p)) + np.real(fp(B, p))), 1.0 / p))
        assert maxabs(naive_power_mean(p, A, B) - expected) <= 1e-10 * (1 + maxabs(expected))

    def test_kubo_ando_and_naive_agree_when_commuting(self):
        A, B = np.diag([1.0, 2.0, 9.0]), np.diag([4.0, 2.0, 0.5])
        for p in (0.5, 1.0, 2.0):
            np.testing.assert_allclose(kubo_ando_mean(p, A, B), naive_power_mean(p, A, B), rtol=1e-13)

    def test_family_shares_factorization(self):
        A, B = pair(4)
        fam = KuboAndoFamily(A, B)
        for p in (0.3, 1.0, 2.0):
            assert maxabs(fam.power(p) - kubo_ando_mean(p, A, B)) == 0.0


class TestDivergence:
    def test_one_by_one(self):
        expected = 1.25 - ((1 + math.sqrt(1.5)) / 2) ** 2
        assert divergence_phi(0.5, [[1.0]], [[1.5]]) == pytest.approx(expected, rel=1e-12)
        assert divergence_phi(0.5, [[1.0]], [[1.5]]) == pytest.approx(0.0126276, abs=5e-8)

    @pytest.mark.parametrize("p", [0.5, 0.7, 1.0])
    def test_zero_on_diagonal(self, p):
        A = random_spd(4, 2)
        assert abs(divergence_phi(p, A, A)) <= 1e-10 * maxabs(A)

    def test_zero_at_p_one(self):
        A, B = pair(5)
        assert abs(divergence_phi(1.0, A, B)) <= 1e-10 * (1 + maxabs(A) + maxabs(B))

    @pytest.mark.parametrize("seed", range(10))
    def test_nonnegative(self, seed):
        A, B = pair(seed, dim=6, lo=0.01, hi=50)
        assert divergence_phi(0.6, A, B) >= -1e-9 * (1 + maxabs(A) + maxabs(B))

    @pytest.mark.parametrize("p", [0.4, 1.1])
    def test_range(self, p):
        with pytest.raises(InvalidInput):
            divergence_phi(p, [[1.0]], [[2.0]])


spec_strategy = st.sampled_from(ALL_SPECS)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), spec_strategy)
def test_symmetry(seed, dim, spec):
    A, B = pair(seed, dim, 0.1, 10)
    M1, M2 = matrix_mean(spec, A, B), matrix_mean(spec, B, A)
    assert maxabs(M1 - M2) <= 1e-8 * (1 + maxabs(M1))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), spec_strategy, st.floats(1e-3, 1e3))
def test_homogeneity(seed, dim, spec, c):
    A, B = pair(seed, dim, 0.1, 10)
    M = matrix_mean(spec, A, B)
    Mc = matrix_mean(spec, c * A, c * B)
    assert maxabs(Mc - c * M) <= 1e-8 * c * maxabs(M)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.sampled_from([0.0, 0.3, 1.0, 2.0]))
def test_congruence_invariance(seed, dim, p):
    rng = np.random.default_rng(seed)
    A, B = random_spd(dim, rng, 0.2, 5), random_spd(dim, rng, 0.2, 5)
    C = rng.standard_normal((dim, dim)) + 2 * np.eye(dim)
    if np.linalg.cond(C) > 1e3:
        C = C + 5 * np.eye(dim)
    lhs = C @ kubo_ando_mean(p, A, B) @ C.T
    rhs = kubo_ando_mean(p, C @ A @ C.T, C @ B @ C.T)
    assert maxabs(lhs - rhs) <= 1e-7 * (1 + maxabs(lhs))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.sampled_from([0.5, 0.8, 2.0]))
def test_naive_orthogonal_invariance(seed, dim, p):
    A, B = pair(seed, dim, 0.2, 5)
    U = random_orthogonal(dim, seed)
    lhs = U @ naive_power_mean(p, A, B) @ U.T
    rhs = naive_power_mean(p, U @ A @ U.T, U @ B @ U.T)
    assert maxabs(lhs - rhs) <= 1e-8 * (1 + maxabs(lhs))


@settings(max_examples=60, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.integers(1, 8),
    st.sampled_from([0.1, 0.5, 0.9, 1.0]),
    st.sampled_from([1.0, 1.5, 4.0]),
)
def test_kubo_ando_chain(seed, dim, p, q):
    A, B = pair(seed, dim, 0.01, 100)
    G = geometric_mean(A, B)
    P = kubo_ando_mean(p, A, B)
    M = 0.5 * (A + B)
    Q = kubo_ando_mean(q, A, B)
    assert loewner_leq(G, P, 1e-9) and loewner_leq(P, M, 1e-9) and loewner_leq(M, Q, 1e-9)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.integers(1, 8),
    st.sampled_from([0.5, 0.75, 1.0]),
    st.sampled_from([1.0, 2.0, 3.0]),
)
def test_naive_chain(seed, dim, p, q):
    A, B = pair(seed, dim, 0.01, 100)
    M = 0.5 * (A + B)
    assert loewner_leq(naive_power_mean(p, A, B), M, 1e-9)
    assert loewner_leq(M, naive_power_mean(q, A, B), 1e-9)


# det = 1 for both, |A - B| = 3I, A # B = (A + B)/sqrt(13)
REVERSE_AGM_PAIR = (np.array([[2.0, -3.0], [-3.0, 5.0]]), np.array([[5.0, -3.0], [-3.0, 2.0]]))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_reverse_agm_commuting(seed, dim):
    rng = np.random.default_rng(seed)
    U = random_orthogonal(dim, rng)
    A = U @ np.diag(rng.uniform(0.01, 100, dim)) @ U.T
    B = U @ np.diag(rng.uniform(0.01, 100, dim)) @ U.T
    assert loewner_leq(min_mean(A, B), geometric_mean(A, B), 1e-9)


@pytest.mark.xfail(strict=True, reason="min mean <= A # B is false for non-commuting pairs; see REVERSE_AGM_PAIR")
def test_reverse_agm():
    A, B = REVERSE_AGM_PAIR
    assert loewner_leq(min_mean(A, B), geometric_mean(A, B), 1e-9)


def test_reverse_agm_counterexample_closed_form():
    A, B = REVERSE_AGM_PAIR
    np.testing.assert_allclose(min_mean(A, B), [[2.0, -3.0], [-3.0, 2.0]], atol=1e-14)
    np.testing.assert_allclose(geometric_mean(A, B), (A + B) / math.sqrt(13), atol=1e-14)
    res = loewner_leq(min_mean(A, B), geometric_mean(A, B), 1e-9)
    assert res.eigenvalue == pytest.approx(math.sqrt(13) - 5, abs=1e-13)
    assert abs(abs(res.vector @ np.array([1.0, -1.0])) - math.sqrt(2)) < 1e-12


@pytest.mark.parametrize("seed", range(20))
def test_small_p_limit(seed):
    A, B = pair(seed, 5, 0.05, 20)
    G = geometric_mean(A, B)
    assert maxabs(kubo_ando_mean(1e-6, A, B) - G) <= 1e-4 * (1 + maxabs(G))


def test_limit_on_known_spectrum():
    A = spd_with_spectrum([1.0, 4.0, 9.0], 0)
    np.testing.assert_allclose(geometric_mean(np.eye(3), A), spd_with_spectrum([1.0, 2.0, 3.0], 0), atol=1e-13)

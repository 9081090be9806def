import numpy as np
import pytest

from meanlab.linalg import random_orthogonal, spectral

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def _report(number, name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _report


def maxabs(M):
    return float(np.max(np.abs(np.asarray(M))))


def spd_with_spectrum(values, seed):
    """SPD matrix with the given eigenvalues in a random orthonormal basis."""
    values = np.asarray(values, dtype=float)
    return spectral(random_orthogonal(values.size, seed), values)


def congruent_pair(X, Y0):
    """``(X, X^{1/2} Y0 X^{1/2})``: a pair whose whitened ratio is ``Y0``."""
    w, V = np.linalg.eigh(X)
    Xh = (V * np.sqrt(w)) @ V.T
    Y = Xh @ Y0 @ Xh
    return X, 0.5 * (Y + Y.T)

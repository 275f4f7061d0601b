import numpy as np
import pytest

from mixzne.extrapolation import NoisePoint


def random_schedule(rng, max_order=5, spread=1e3, min_gap=1e-3):
    """Distinct positive levels with max/min <= spread and gaps >= min_gap * max."""
    while True:
        k = int(rng.integers(0, max_order + 1))
        lam = np.sort(np.exp(rng.uniform(0.0, np.log(spread), k + 1)))
        if k == 0 or np.min(np.diff(lam)) / lam.max() >= min_gap:
            return lam


def points_on_polynomial(lam, coef, variance=0.0):
    """Points on sum_j coef[j] * (lam / max lam)**j; the zero-noise value is coef[0]."""
    y = np.polynomial.polynomial.polyval(lam / lam.max(), coef)
    return [NoisePoint(float(l), float(v), variance) for l, v in zip(lam, y)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def record_criterion(number, name, ok, detail=""):
    """Log one acceptance line (shown in the terminal summary) and assert it."""
    status = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {number} failed: {name} {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def points(n):
    """All +-1 points with variable 1 first, in mask order."""
    return [tuple(-1 if (m >> i) & 1 else 1 for i in range(n)) for m in range(1 << n)]


def chi(S, x):
    out = 1
    for i, xi in enumerate(x):
        if (S >> i) & 1:
            out *= xi
    return out


def brute_fourier(values, n):
    """Direct 2^n-point sum per coefficient, no butterfly."""
    pts = points(n)
    return [sum(Fraction(values[m]) * chi(S, pts[m]) for m in range(1 << n)) / (1 << n)
            for S in range(1 << n)]


@pytest.fixture
def tmp_files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


ACCEPTANCE_LINES: dict = {}


def record(criterion: int, ok: bool, detail: str) -> str:
    line = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[criterion] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])

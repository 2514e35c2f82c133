import math

import numpy as np
import pytest

from simplexangles.mc import RandomStream

# 1/8 + 3 arcsin(-1/3) / (4 pi): vertex angle of the regular tetrahedron
REGULAR_ANGLE_3D = 1 / 8 + 3 * math.asin(-1 / 3) / (4 * math.pi)


def dot_loop(u, v):
    s = 0.0
    for a, b in zip(u, v):
        s += a * b
    return s


def cofactor_det(a):
    """Laplace expansion along the first row; test oracle for small d."""
    a = [list(map(float, row)) for row in a]
    n = len(a)
    if n == 1:
        return a[0][0]
    total = 0.0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        total += (-1) ** j * a[0][j] * cofactor_det(minor)
    return total


def trivariate_orthant(cov):
    """P[Y >= 0] for centred trivariate normal: 1/8 + sum arcsin(rho_ij) / (4 pi)."""
    cov = np.asarray(cov, dtype=float)
    s = np.sqrt(np.diag(cov))
    r = cov / np.outer(s, s)
    return 1 / 8 + (math.asin(r[0, 1]) + math.asin(r[0, 2]) + math.asin(r[1, 2])) / (4 * math.pi)


def random_cone_generators(rng, d, m=None, max_cond=1e3):
    m = d if m is None else m
    while True:
        v = rng.standard_normal((d, m))
        if np.linalg.cond(v) < max_cond:
            return v


@pytest.fixture
def stream():
    return RandomStream(seed=20240601)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES = []


def acceptance_line(criterion, passed, detail=""):
    line = f"[{criterion}] {'PASS' if passed else 'FAIL'} {detail}".rstrip()
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

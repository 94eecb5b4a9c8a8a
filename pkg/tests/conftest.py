import numpy as np
import pytest


def random_spd(rng, n, low=0.1, high=10.0):
    """SPD matrix with eigenvalues drawn uniformly from [low, high]."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    w = rng.uniform(low, high, n)
    X = (Q * w) @ Q.T
    return 0.5 * (X + X.T)


def random_sym(rng, n, scale=1.0):
    A = rng.standard_normal((n, n)) * scale
    return 0.5 * (A + A.T)


@pytest.fixture
def rng():
    return np.random.default_rng(20190826)


@pytest.fixture
def make_spd(rng):
    def make(n, low=0.1, high=10.0):
        return random_spd(rng, n, low, high)

    return make


@pytest.fixture
def make_frames(rng):
    """Random image set ``(n, h, w)`` in [0, 1]."""

    def make(n=8, h=24, w=24):
        return rng.uniform(0.0, 1.0, (n, h, w))

    return make


def angular_recursion(r, theta, dps=40):
    """Angular function from its defining recursion, by high-precision numeric differentiation.

    ``J_r = (-1)^r sin^(2r+1) t ((1/sin t) d/dt)^r ((pi - t)/sin t)``, with each
    derivative taken by mpmath finite differences instead of symbolically.
    """
    import mpmath

    with mpmath.workdps(dps):
        def f0(t):
            return (mpmath.pi - t) / mpmath.sin(t)

        f = f0
        for _ in range(r):
            f = (lambda g: lambda t: mpmath.diff(g, t) / mpmath.sin(t))(f)
        t = mpmath.mpf(theta)
        return float((-1) ** r * mpmath.sin(t) ** (2 * r + 1) * f(t))


_CRITERIA = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion, then assert."""

    def check(name, ok, detail):
        line = f"{name} {'PASS' if ok else 'FAIL'}: {detail}"
        _CRITERIA.append(line)
        print(line)
        assert ok, line

    def skip(name, reason):
        line = f"{name} SKIP: {reason}"
        _CRITERIA.append(line)
        pytest.skip(line)

    check.skip = skip
    return check


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)

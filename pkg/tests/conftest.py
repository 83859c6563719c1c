import math

import pytest

from jacobi_barrier import OptionContract

ACCEPTANCE_LINES: list[str] = []


def example1(lower=95.0, dates=5, spot=100.0):
    return OptionContract(spot=spot, strike=100.0, lower=lower, upper=120.0, rate=0.05, vol=0.25,
                          expiry=0.5, dates=dates)


def example2(spot=100.0):
    return OptionContract(spot=spot, strike=100.0, lower=95.0, upper=110.0, rate=0.05, vol=0.25,
                          expiry=0.5, dates=5)


@pytest.fixture
def ex1():
    return example1()


@pytest.fixture
def ex1_m125():
    return example1(dates=125)


@pytest.fixture
def ex2():
    return example2()


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def gaussian_poly_moments(x, lo, hi, tau, c2, degree):
    """``int_lo^hi k(x - xi) xi**p dxi`` for p = 0..degree, by the truncated-moment recursion.

    With ``u = xi - x`` and variance ``v = 2 c2 tau``:
    ``m_p = v (p - 1) m_{p-2} - v [u^{p-1} k(u)]_a^b``.
    """
    v = 2.0 * c2 * tau
    a, b = lo - x, hi - x
    k = lambda u: math.exp(-u * u / (2 * v)) / math.sqrt(2 * math.pi * v)  # noqa: E731
    m = [0.5 * (math.erf(b / math.sqrt(2 * v)) - math.erf(a / math.sqrt(2 * v)))]
    if degree >= 1:
        m.append(-v * (k(b) - k(a)))
    for p in range(2, degree + 1):
        m.append(v * (p - 1) * m[p - 2] - v * (b ** (p - 1) * k(b) - a ** (p - 1) * k(a)))
    # expand (x + u)^p
    out = []
    for p in range(degree + 1):
        out.append(sum(math.comb(p, q) * x ** (p - q) * m[q] for q in range(p + 1)))
    return out

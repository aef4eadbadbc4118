from fractions import Fraction

import numpy as np
import pytest

from hamkit import Kernel, MonotoneSplit, lidstone_kernel


def constant_kernel(c, t1=0, t2=1, k=1):
    return Kernel.from_coefficients([[c]], [[c]], t1, t2, k=k, name=f"const{c}")


def min_kernel(k=1):
    """G(t, tau) = min(t, tau): nonnegative, nondecreasing rows, k-scaling with k = 1."""
    return Kernel.from_coefficients([[0, 1]], [[0], [1]], 0, 1, k=k, name="min")


def quartic(t):
    return (t**4 - 2 * t**3 + t) / 24


@pytest.fixture
def lidstone():
    return lidstone_kernel()


@pytest.fixture
def example_split():
    return MonotoneSplit.from_expressions("1 + x/2", "1/(1+x)")


@pytest.fixture
def unit_split():
    return MonotoneSplit(lambda x: np.ones_like(x), lambda x: np.zeros_like(x))


@pytest.fixture
def zero_split():
    return MonotoneSplit()


F = Fraction

# (criterion, passed, detail) rows filled in by test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")

from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from hamkit import DomainError, Interval, Kernel, lidstone_kernel, reflected_eval

t_s, tau_s = sp.symbols("t tau")
# branches as printed, typed in independently of the package tables
UPPER = (tau_s**3 * t_s - 3 * tau_s**2 * t_s + tau_s * t_s**3 + 2 * tau_s * t_s - t_s**3) / 6
LOWER = (tau_s**3 * t_s - tau_s**3 + tau_s * t_s**3 - 3 * tau_s * t_s**2 + 2 * tau_s * t_s) / 6


def test_interval_points():
    iv = Interval(Fraction(0), Fraction(1))
    assert (iv.midpoint(), iv.quarter(), iv.eighth()) == (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))
    iv = Interval(-2.0, 6.0)
    for p in (iv.midpoint(), iv.quarter(), iv.eighth()):
        assert iv.t1 < p < iv.t2
    with pytest.raises(ValueError):
        Interval(1, 1)


def test_lidstone_metadata(lidstone):
    assert (lidstone.domain.t1, lidstone.domain.t2) == (0, 1)
    assert lidstone.k_exponent == 1
    assert lidstone.is_exact


@pytest.mark.parametrize(
    "t, tau, expected",
    [(0.5, 0.5, 1 / 48), (0.0, 0.3, 0.0), (1.0, 0.3, 0.0)],
)
def test_eval_examples(lidstone, t, tau, expected):
    assert lidstone.eval(t, tau) == pytest.approx(expected, abs=1e-16)


def test_eval_matches_printed_branches_on_grid(lidstone):
    g = np.linspace(0, 1, 41)
    lo = sp.lambdify((t_s, tau_s), LOWER)
    up = sp.lambdify((t_s, tau_s), UPPER)
    for t in g:
        for tau in g:
            ref = lo(t, tau) if tau <= t else up(t, tau)
            assert lidstone.eval(t, tau) == pytest.approx(ref, abs=1e-15)


def test_row_polynomials_at_one_eighth(lidstone):
    t = Fraction(1, 8)
    assert lidstone.row_coefficients(t, "upper") == [Fraction(-1, 3072), Fraction(43, 1024), Fraction(-1, 16), Fraction(1, 48)]
    assert lidstone.row_coefficients(t, "lower") == [0, Fraction(35, 1024), 0, Fraction(-7, 48)]


def test_crease_agreement(lidstone):
    t = np.linspace(0, 1, 201)
    lo = lidstone.eval_branch("lower", t, t)
    up = lidstone.eval_branch("upper", t, t)
    assert np.all(np.abs(lo - up) <= 1e-12 * (1 + np.abs(up)))


def test_crease_mismatch_rejected():
    with pytest.raises(ValueError, match="crease"):
        Kernel.from_coefficients([[1]], [[0], [1]], 0, 1)


@pytest.mark.parametrize("t, tau", [(-0.1, 0.5), (0.5, 1.0000001), (2, 0)])
def test_out_of_domain(lidstone, t, tau):
    with pytest.raises(DomainError) as info:
        lidstone.eval(t, tau)
    assert info.value.coordinate[1] in (t, tau)


def test_reflected_eval(lidstone):
    assert reflected_eval(lidstone, 0.25, 0.75) == lidstone.eval(0.75, 0.25)
    assert reflected_eval(lidstone, 0.5, 0.5) == pytest.approx(1 / 48, abs=1e-17)
    assert reflected_eval(lidstone, 0.3, 0.6) == lidstone.eval(1 - 0.3, 1 - 0.6)


def test_lidstone_reflection_symmetry_grid(lidstone):
    g = np.linspace(0, 1, 101)
    T, S = np.meshgrid(g, g, indexing="ij")
    assert np.max(np.abs(reflected_eval(lidstone, T, S) - lidstone.eval(T, S))) <= 1e-12


def test_eval_deterministic(lidstone):
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 1, size=(50, 2))
    a = [lidstone.eval(t, s) for t, s in pts]
    b = [lidstone.eval(t, s) for t, s in pts]
    assert a == b


def test_inexact_coefficients_disable_exact_path():
    k = Kernel.from_coefficients([[0.1]], [[0.1]], 0, 1)
    assert not k.is_exact
    assert Kernel.from_coefficients([["1/10"]], [["1/10"]], 0, 1).is_exact

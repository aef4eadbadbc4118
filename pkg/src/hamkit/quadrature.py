"""Composite Gauss-Legendre quadrature with a panel break at the crease.

Everything here is fixed order and deterministic: panels are summed left to
right in one accumulator, so repeated calls give bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import EvaluationError
from .kernel import Kernel, as_exact

__all__ = [
    "QuadratureConfig",
    "gauss_legendre",
    "integrate",
    "kernel_row_integral",
    "symmetrized_row_integral",
    "exact_row_integral",
    "exact_symmetrized_row_integral",
]


@dataclass(frozen=True)
class QuadratureConfig:
    nodes_per_panel: int = 16
    panels: int = 8
    crease_split: bool = True

    def __post_init__(self):
        if self.nodes_per_panel < 2:
            raise ValueError("nodes_per_panel must be >= 2")
        if self.panels < 1:
            raise ValueError("panels must be >= 1")


@lru_cache(maxsize=32)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _eval_vectorised(f, pts):
    with np.errstate(all="ignore"):
        try:
            vals = np.asarray(f(pts), dtype=float)
            vals = np.broadcast_to(vals, pts.shape)
        except (TypeError, ValueError):
            vals = np.array([float(f(p)) for p in pts])
    return vals


def integrate(f, a, b, config: QuadratureConfig | None = None) -> float:
    """Composite Gauss-Legendre approximation of the integral of f over [a, b].

    ``f`` should accept a numpy array; scalar-only callables are evaluated
    point by point as a fallback.
    """
    config = config or QuadratureConfig()
    a, b = float(a), float(b)
    if a > b:
        raise ValueError(f"integration bounds reversed: a={a} > b={b}")
    if a == b:
        return 0.0
    x, w = gauss_legendre(config.nodes_per_panel)
    edges = np.linspace(a, b, config.panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        pts = lo + half * (x + 1.0)
        vals = _eval_vectorised(f, pts)
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise EvaluationError(
                f"integrand is {vals[bad]!r} at {pts[bad]!r}", location=float(pts[bad])
            )
        total += half * float(np.dot(w, vals))
    return total


def kernel_row_integral(kernel: Kernel, t, a, b, config: QuadratureConfig | None = None) -> float:
    """Integral of G(t, tau) over tau in [a, b], breaking panels at tau = t."""
    config = config or QuadratureConfig()
    t, a, b = float(t), float(a), float(b)
    kernel._check_domain("t", t)
    kernel._check_domain("tau", np.array([a, b]))
    row = lambda tau: kernel.eval(t, tau)  # noqa: E731
    if config.crease_split and a < t < b:
        return integrate(row, a, t, config) + integrate(row, t, b, config)
    return integrate(row, a, b, config)


def symmetrized_row_integral(kernel: Kernel, t, config: QuadratureConfig | None = None) -> float:
    """Twice the integral of G(t, tau) over the left half [T1, midpoint]."""
    dom = kernel.domain
    return 2.0 * kernel_row_integral(kernel, t, dom.t1, dom.midpoint(), config)


def _poly_antiderivative_diff(coeffs, a: Fraction, b: Fraction) -> Fraction:
    total = Fraction(0)
    for j, c in enumerate(coeffs):
        if c:
            total += c * (b ** (j + 1) - a ** (j + 1)) / (j + 1)
    return total


def exact_row_integral(kernel: Kernel, t, a, b) -> Fraction | None:
    """Exact rational row integral, or None if the kernel or bounds are inexact."""
    t, a, b = as_exact(t), as_exact(a), as_exact(b)
    if not kernel.is_exact or None in (t, a, b):
        return None
    if a > b:
        raise ValueError(f"integration bounds reversed: a={a} > b={b}")
    kernel._check_domain("t", float(t))
    kernel._check_domain("tau", np.array([float(a), float(b)]))
    total = Fraction(0)
    lo_end = min(b, t)
    if a < lo_end:
        total += _poly_antiderivative_diff(kernel.row_coefficients(t, "lower"), a, lo_end)
    hi_start = max(a, t)
    if hi_start < b:
        total += _poly_antiderivative_diff(kernel.row_coefficients(t, "upper"), hi_start, b)
    return total


def exact_symmetrized_row_integral(kernel: Kernel, t) -> Fraction | None:
    dom = kernel.domain
    half = exact_row_integral(kernel, t, dom.t1, dom.midpoint())
    return None if half is None else 2 * half

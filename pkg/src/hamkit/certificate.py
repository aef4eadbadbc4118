"""Existence-certificate conditions for the general and symmetric theorems.

For box parameters (a, b, c, d) and a monotone split, four strict
inequalities are evaluated as signed margins (positive means satisfied)::

    m1 = f_up(a + 4^-k d) * I1 - a
    m2 = b - f_up(b + 4^k c) * I2
    m3 = c - f_down(0) * I3
    m4 = f_down(b + d) * I4 - d

The thresholds I1..I4 are kernel row integrals at the focal and right
points. For polynomial kernels they are also computed exactly, so the
condition bounds (b / I2 and so on) can be reported as rationals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .cone import GENERAL, SYMMETRIC
from .errors import DegenerateKernelError
from .kernel import Kernel, as_exact
from .monotone import MonotoneSplit
from .quadrature import (
    QuadratureConfig,
    exact_row_integral,
    kernel_row_integral,
    symmetrized_row_integral,
)

__all__ = [
    "BoxParams",
    "Thresholds",
    "Certificate",
    "RelationReport",
    "SearchGrid",
    "compute_thresholds",
    "certify",
    "corollary_relations",
    "simplified_certify",
    "search_box_params",
    "default_x_max",
]

# exact and quadrature thresholds must agree to this before the exact value is trusted
_EXACT_AGREEMENT = 1e-12


def _fmt(v):
    if isinstance(v, Fraction):
        return str(v)
    return repr(float(v))


def _num(v):
    exact = as_exact(v)
    return exact if exact is not None else float(v)


@dataclass(frozen=True)
class BoxParams:
    a: Fraction | float = 0
    b: Fraction | float = 1
    c: Fraction | float = 1
    d: Fraction | float = 0

    def __post_init__(self):
        for name in "abcd":
            v = _num(getattr(self, name))
            if not v >= 0:
                raise ValueError(f"box parameter {name}={v} must be nonnegative")
            object.__setattr__(self, name, v)

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)

    def to_dict(self):
        return {n: _fmt(getattr(self, n)) for n in "abcd"}


@dataclass(frozen=True)
class Thresholds:
    """The four condition integrals, as floats, with exact values when known.

    ``I3_doubled`` and ``I3_literal`` are only distinct for the symmetric
    variant: the former doubles the half-interval integral, the latter
    integrates over the full interval. ``I3`` is the larger of the two.
    """

    I1: float
    I2: float
    I3: float
    I4: float
    variant: str
    exact: dict = field(default_factory=dict)
    I3_doubled: float | None = None
    I3_literal: float | None = None

    def value(self, name):
        """Exact Fraction when available, else float."""
        return self.exact.get(name, getattr(self, name))

    def to_dict(self):
        out = {"variant": self.variant}
        for name in ("I1", "I2", "I3", "I4"):
            out[name] = getattr(self, name)
            if name in self.exact:
                out[name + "_exact"] = str(self.exact[name])
        if self.variant == SYMMETRIC:
            out["I3_doubled"] = self.I3_doubled
            out["I3_literal"] = self.I3_literal
            for key in ("I3_doubled", "I3_literal"):
                if key in self.exact:
                    out[key + "_exact"] = str(self.exact[key])
        return out


def _agree(name, quad, exact):
    if exact is None:
        return None
    if abs(quad - float(exact)) > _EXACT_AGREEMENT * max(1.0, abs(quad)):
        raise AssertionError(f"{name}: quadrature {quad!r} disagrees with exact value {exact}")
    return exact


def compute_thresholds(kernel: Kernel, variant: str = GENERAL, qcfg: QuadratureConfig | None = None) -> Thresholds:
    dom = kernel.domain
    t1, t2, mid = dom.t1, dom.t2, dom.midpoint()
    q = dom.quarter() if variant == GENERAL else dom.eighth()
    if variant not in (GENERAL, SYMMETRIC):
        raise ValueError(f"unknown variant {variant!r}")

    quad = {}
    exact = {}

    def both(name, t, a, b):
        quad[name] = kernel_row_integral(kernel, t, a, b, qcfg)
        e = _agree(name, quad[name], exact_row_integral(kernel, t, a, b))
        if e is not None:
            exact[name] = e

    if variant == GENERAL:
        both("I1", q, q, t2)
        both("I2", t2, t1, t2)
        both("I3", q, t1, t2)
        quad["I4"] = quad["I2"]
        if "I2" in exact:
            exact["I4"] = exact["I2"]
        i3_doubled = i3_literal = None
    else:
        both("I1", q, q, mid)
        both("I2", mid, t1, t2)
        both("I3_literal", q, t1, t2)
        both("I4", mid, t1, mid)
        quad["I3_doubled"] = symmetrized_row_integral(kernel, q, qcfg)
        half = exact_row_integral(kernel, q, t1, mid)
        if half is not None:
            exact["I3_doubled"] = _agree("I3_doubled", quad["I3_doubled"], 2 * half)
        # larger I3 -> smaller bound c / I3: valid under either reading
        pick = "I3_doubled" if quad["I3_doubled"] >= quad["I3_literal"] else "I3_literal"
        quad["I3"] = quad[pick]
        if pick in exact:
            exact["I3"] = exact[pick]
        i3_doubled, i3_literal = quad["I3_doubled"], quad["I3_literal"]

    for name in ("I1", "I2", "I3", "I4"):
        if not quad[name] > 0:
            raise DegenerateKernelError(f"threshold integral {name} = {quad[name]!r} is not positive")
    return Thresholds(quad["I1"], quad["I2"], quad["I3"], quad["I4"], variant, exact, i3_doubled, i3_literal)


def _pow4(k, sign):
    """4^(sign*k), exact when k is a nonnegative integer."""
    e = as_exact(k)
    if e is not None and e.denominator == 1:
        return Fraction(4) ** (sign * int(e))
    return 4.0 ** (sign * float(k))


def _bound(p, integral):
    # p / I, exact when both are exact
    if isinstance(p, Fraction) and isinstance(integral, Fraction):
        return p / integral
    return float(p) / float(integral)


@dataclass
class Certificate:
    params: BoxParams
    thresholds: Thresholds
    margins: tuple
    satisfied: bool
    variant: str
    bounds: dict
    f_values: dict
    strictness_eps: float = 0.0
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "variant": self.variant,
            "params": self.params.to_dict(),
            "thresholds": self.thresholds.to_dict(),
            "margins": {f"m{i + 1}": m for i, m in enumerate(self.margins)},
            "bounds": {k: _fmt(v) for k, v in self.bounds.items()},
            "bounds_float": {k: float(v) for k, v in self.bounds.items()},
            "f_values": self.f_values,
            "strictness_eps": self.strictness_eps,
            "satisfied": self.satisfied,
            "notes": list(self.notes),
        }


def certify(
    kernel: Kernel,
    split: MonotoneSplit,
    params: BoxParams,
    variant: str = GENERAL,
    qcfg: QuadratureConfig | None = None,
    strictness_eps: float = 0.0,
    thresholds: Thresholds | None = None,
) -> Certificate:
    th = thresholds or compute_thresholds(kernel, variant, qcfg)
    k = kernel.k_exact if kernel.k_exact is not None else kernel.k_exponent
    a, b, c, d = params.as_tuple()
    up_arg1 = float(a) + float(_pow4(k, -1)) * float(d)
    up_arg2 = float(b) + float(_pow4(k, 1)) * float(c)
    down_arg4 = float(b) + float(d)
    fv = {
        "f_up(a+4^-k*d)": float(split.up(up_arg1)),
        "f_up(b+4^k*c)": float(split.up(up_arg2)),
        "f_down(0)": float(split.down(0.0)),
        "f_down(b+d)": float(split.down(down_arg4)),
    }
    I1, I2, I3, I4 = (float(th.value(n)) for n in ("I1", "I2", "I3", "I4"))
    margins = (
        fv["f_up(a+4^-k*d)"] * I1 - float(a),
        float(b) - fv["f_up(b+4^k*c)"] * I2,
        float(c) - fv["f_down(0)"] * I3,
        fv["f_down(b+d)"] * I4 - float(d),
    )
    # condition form: f_up(.) > a/I1, f_up(.) < b/I2, f_down(0) < c/I3, f_down(.) > d/I4
    bounds = {
        "cond1_lower": _bound(a, th.value("I1")),
        "cond2_upper": _bound(b, th.value("I2")),
        "cond3_upper": _bound(c, th.value("I3")),
        "cond4_lower": _bound(d, th.value("I4")),
    }
    order_ok = a == 0 or b > a
    satisfied = min(margins) > strictness_eps and order_ok
    notes = []
    if not order_ok:
        notes.append("b > a is required when a > 0")
    for i, m in enumerate(margins, 1):
        if m == 0 or (0 < m <= strictness_eps):
            notes.append(f"condition {i} on the boundary (margin {m!r}); not certified")
    if variant == SYMMETRIC:
        lit = th.exact.get("I3_literal", th.I3_literal)
        pap = th.exact.get("I3_doubled", th.I3_doubled)
        if float(lit) != float(pap):
            notes.append(
                f"I3 doubled half-interval value {_fmt(pap)} differs from the full-interval "
                f"integral {_fmt(lit)}; bound c/I3 uses the larger I3: "
                f"c/I3_doubled = {_fmt(_bound(c, pap))}, c/I3_literal = {_fmt(_bound(c, lit))}"
            )
    return Certificate(params, th, margins, satisfied, variant, bounds, fv, strictness_eps, notes)


@dataclass
class RelationReport:
    relation1_bound: Fraction | float
    relation1_slack: float
    relation1_passed: bool
    relation2_applies: bool
    relation2_bound: Fraction | float
    relation2_slack: float
    relation2_passed: bool

    @property
    def passed(self):
        return self.relation1_passed and self.relation2_passed

    def to_dict(self):
        return {
            "relation1": {"d_below": _fmt(self.relation1_bound), "slack": self.relation1_slack,
                          "passed": self.relation1_passed},
            "relation2": {"applies": self.relation2_applies, "a_below": _fmt(self.relation2_bound),
                          "slack": self.relation2_slack, "passed": self.relation2_passed},
        }


def corollary_relations(thresholds: Thresholds, params: BoxParams, k) -> RelationReport:
    """Necessary relations between (a, b, c, d) implied by the theorem.

    (1) d < c * I4 / I3 (I4 = I2 in the general variant).
    (2) if d < 4^(2k) c then a < b * I1 / I2; vacuous otherwise.
    """
    th = thresholds
    a, b, c, d = params.as_tuple()
    r1 = _mul(c, _ratio(th.value("I4"), th.value("I3")))
    s1 = float(r1) - float(d)
    applies = float(d) < float(_pow4(k, 2)) * float(c)
    r2 = _mul(b, _ratio(th.value("I1"), th.value("I2")))
    s2 = float(r2) - float(a)
    return RelationReport(r1, s1, s1 > 0, applies, r2, s2, (not applies) or s2 > 0)


def _ratio(x, y):
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x / y
    return float(x) / float(y)


def _mul(x, y):
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x * y
    return float(x) * float(y)


def simplified_certify(
    kernel: Kernel,
    split: MonotoneSplit,
    b,
    c,
    variant: str = GENERAL,
    qcfg: QuadratureConfig | None = None,
    strictness_eps: float = 0.0,
    thresholds: Thresholds | None = None,
) -> Certificate:
    """Certificate with a = d = 0: conditions reduce to f_up(0) > 0 and f_down(b) > 0."""
    if not (float(b) > 0 and float(c) > 0):
        raise ValueError("b and c must be positive")
    return certify(kernel, split, BoxParams(0, b, c, 0), variant, qcfg, strictness_eps, thresholds)


def _pow2_grid(lo=-6, hi=6):
    return tuple(Fraction(2) ** e for e in range(lo, hi + 1))


@dataclass(frozen=True)
class SearchGrid:
    """Candidate values per box parameter; scanned b, then c, then a, then d."""

    a: tuple = (Fraction(0),) + _pow2_grid()
    b: tuple = _pow2_grid()
    c: tuple = _pow2_grid()
    d: tuple = (Fraction(0),) + _pow2_grid()

    def max_argument(self, k: float) -> float:
        if not all((self.a, self.b, self.c, self.d)):
            return 1.0
        big = max(map(float, self.b))
        return big + 4.0 ** k * max(map(float, self.c)) + max(map(float, self.d)) + 1


def default_x_max(params: BoxParams, k: float) -> float:
    """Largest argument any condition evaluates, plus one."""
    a, b, c, d = map(float, params.as_tuple())
    return max(b + 4.0 ** k * c, b + d, a + 4.0 ** (-k) * d) + 1.0


def search_box_params(
    kernel: Kernel,
    split: MonotoneSplit,
    variant: str = GENERAL,
    grid: SearchGrid | None = None,
    qcfg: QuadratureConfig | None = None,
    strictness_eps: float = 0.0,
) -> BoxParams | None:
    """First satisfying (a, b, c, d) in scan order, or None."""
    grid = grid or SearchGrid()
    if not all((grid.a, grid.b, grid.c, grid.d)):
        return None
    th = compute_thresholds(kernel, variant, qcfg)
    k = kernel.k_exact if kernel.k_exact is not None else kernel.k_exponent
    for b, c, a, d in itertools.product(sorted(grid.b), sorted(grid.c), sorted(grid.a), sorted(grid.d)):
        if a > 0 and not b > a:
            continue
        params = BoxParams(a, b, c, d)
        if not corollary_relations(th, params, k).passed:
            continue
        if certify(kernel, split, params, variant, qcfg, strictness_eps, th).satisfied:
            return params
    return None


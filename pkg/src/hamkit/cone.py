"""Cone membership and the four functionals for grid functions.

Two cones are supported. The general cone holds nonnegative, nondecreasing
functions with the k-scaling property on the whole interval. The symmetric
cone holds functions symmetric about the midpoint that are nondecreasing and
k-scaling on the left half.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .kernel import Interval

__all__ = [
    "GENERAL",
    "SYMMETRIC",
    "ConeSpec",
    "GridFunction",
    "ClauseResult",
    "MembershipReport",
    "functionals",
    "check_membership",
    "MEMBERSHIP_TOL",
]

GENERAL = "general"
SYMMETRIC = "symmetric"
MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class ConeSpec:
    variant: str
    interval: Interval
    k_exponent: float

    def __post_init__(self):
        if self.variant not in (GENERAL, SYMMETRIC):
            raise ValueError(f"unknown cone variant {self.variant!r}")
        if not self.k_exponent > 0:
            raise ValueError("k_exponent must be positive")

    @property
    def focal_point(self):
        return self.interval.quarter() if self.variant == GENERAL else self.interval.eighth()

    @property
    def right_point(self):
        return self.interval.t2 if self.variant == GENERAL else self.interval.midpoint()


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Node values of a function; linear interpolation in between."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        values = np.array(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != values.shape:
            raise ValueError("nodes and values must be 1-d arrays of equal length")
        if nodes.size < 2 or np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly ascending with at least two entries")
        nodes.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, fn: Callable, nodes) -> "GridFunction":
        nodes = np.asarray(nodes, dtype=float)
        return cls(nodes, np.broadcast_to(np.asarray(fn(nodes), dtype=float), nodes.shape))

    @classmethod
    def zeros(cls, nodes) -> "GridFunction":
        nodes = np.asarray(nodes, dtype=float)
        return cls(nodes, np.zeros_like(nodes))

    def __call__(self, t):
        return np.interp(t, self.nodes, self.values)

    def __len__(self):
        return self.nodes.size

    def scaled(self, factor: float) -> "GridFunction":
        return GridFunction(self.nodes, factor * self.values)

    def on_interval(self, interval: Interval) -> bool:
        return self.nodes[0] == float(interval.t1) and self.nodes[-1] == float(interval.t2)


def _require_interval(x: GridFunction, spec: ConeSpec):
    if not x.on_interval(spec.interval):
        raise ValueError(
            f"grid [{x.nodes[0]}, {x.nodes[-1]}] does not match cone interval "
            f"[{spec.interval.t1}, {spec.interval.t2}]"
        )


def functionals(x: GridFunction, spec: ConeSpec) -> dict:
    """beta and psi read x at the right point, theta at the focal point;
    alpha is the true minimum over [focal, right], which equals theta only
    when x is nondecreasing there."""
    _require_interval(x, spec)
    q, r = float(spec.focal_point), float(spec.right_point)
    inside = x.values[(x.nodes > q) & (x.nodes < r)]
    xq, xr = float(x(q)), float(x(r))
    alpha = min([xq, xr, *inside.tolist()])
    return {"alpha": alpha, "beta": xr, "theta": xq, "psi": xr}


@dataclass
class ClauseResult:
    passed: bool
    worst_margin: float
    witness: tuple | None

    def to_dict(self):
        return {"passed": self.passed, "worst_margin": self.worst_margin, "witness": self.witness}


@dataclass
class MembershipReport:
    variant: str
    tol: float
    clauses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses.values())

    @property
    def worst_margin(self) -> float:
        return min(c.worst_margin for c in self.clauses.values())

    def to_dict(self):
        return {
            "variant": self.variant,
            "passed": self.passed,
            "tol": self.tol,
            "clauses": {name: c.to_dict() for name, c in self.clauses.items()},
        }


def _clause(margins: np.ndarray, coords, tol: float) -> ClauseResult:
    if margins.size == 0:
        return ClauseResult(True, float("inf"), None)
    i = int(np.argmin(margins))  # first occurrence: deterministic witness
    worst = float(margins.flat[i])
    return ClauseResult(worst >= -tol, worst, coords(i))


def check_membership(x: GridFunction, spec: ConeSpec, tol: float = MEMBERSHIP_TOL) -> MembershipReport:
    """Check every cone clause on the stored nodes.

    Clause margins are signed (negative means violated) and witnesses are
    node coordinates. Clause names: ``nonnegative``, ``nondecreasing``,
    ``k_scaling`` and, for the symmetric cone, ``symmetric``.
    """
    _require_interval(x, spec)
    t, v = x.nodes, x.values
    t1 = float(spec.interval.t1)
    right = float(spec.right_point)
    report = MembershipReport(spec.variant, tol)

    report.clauses["nonnegative"] = _clause(v, lambda i: (float(t[i]),), tol)

    m = int(np.searchsorted(t, right, side="right"))  # nodes in [T1, right]
    tl, vl = t[:m], v[:m]
    report.clauses["nondecreasing"] = _clause(
        np.diff(vl), lambda i: (float(tl[i]), float(tl[i + 1])), tol
    )

    # (y - T1)^k x(w) <= (w - T1)^k x(y) for y <= w
    k = spec.k_exponent
    s = (tl - t1) ** k
    margin = s[None, :] * vl[:, None] - s[:, None] * vl[None, :]  # [y, w]
    upper = np.triu(np.ones((m, m), dtype=bool))
    masked = np.where(upper, margin, np.inf)
    report.clauses["k_scaling"] = _clause(
        masked.ravel(), lambda i: (float(tl[i // m]), float(tl[i % m])), tol
    )

    if spec.variant == SYMMETRIC:
        reflected = x(float(spec.interval.t2) - (t - t1))
        report.clauses["symmetric"] = _clause(-np.abs(reflected - v), lambda i: (float(t[i]),), tol)
    return report

"""The nonlinearity f = f_up + f_down and checks on its monotone parts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, EvaluationError

__all__ = ["MonotoneSplit", "SplitReport", "eval_f", "verify_split", "SPLIT_TOL"]

SPLIT_TOL = 1e-12


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _apply(fn, x):
    with np.errstate(all="ignore"):
        out = np.asarray(fn(x), dtype=float)
    return np.broadcast_to(out, np.shape(x)).copy() if np.ndim(x) else float(out)


@dataclass(frozen=True)
class MonotoneSplit:
    """Pair of callables: ``f_up`` nondecreasing, ``f_down`` nonincreasing.

    Both are expected to accept numpy arrays. ``up_source``/``down_source``
    keep the expression text when the split was parsed from a config.
    """

    f_up: Callable = _zero
    f_down: Callable = _zero
    up_source: str | None = None
    down_source: str | None = None

    @classmethod
    def from_expressions(cls, up: str, down: str) -> "MonotoneSplit":
        from .expr import parse_expression

        return cls(parse_expression(up), parse_expression(down), up, down)

    def up(self, x):
        return self._part(self.f_up, "f_up", x)

    def down(self, x):
        return self._part(self.f_down, "f_down", x)

    def __call__(self, x):
        return eval_f(self, x)

    def _part(self, fn, name, x):
        _check_nonnegative(x)
        vals = _apply(fn, x)
        _check_finite(vals, x, name)
        return vals

    def scaled(self, up_factor=1.0, down_factor=1.0) -> "MonotoneSplit":
        """Split with each part multiplied by a constant (used by sensitivity checks)."""
        fu, fd = self.f_up, self.f_down
        return MonotoneSplit(lambda x: up_factor * _apply(fu, x), lambda x: down_factor * _apply(fd, x))


def _check_nonnegative(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        bad = float(arr[arr < 0].flat[0]) if arr.ndim else float(arr)
        raise DomainError(f"nonlinearity evaluated at negative argument x={bad!r}", coordinate=bad)


def _check_finite(vals, x, name):
    arr = np.asarray(vals)
    if not np.all(np.isfinite(arr)):
        if arr.ndim:
            i = int(np.flatnonzero(~np.isfinite(arr))[0])
            where, v = float(np.asarray(x).flat[i]), arr.flat[i]
        else:
            where, v = float(x), float(arr)
        raise EvaluationError(f"{name}({where!r}) = {v!r}", location=where)


def eval_f(split: MonotoneSplit, x):
    """f(x) = f_up(x) + f_down(x) for x >= 0 (scalar or array)."""
    up = split.up(x)
    down = split.down(x)
    out = up + down
    _check_finite(out, x, "f")
    return out


@dataclass
class SplitReport:
    passed: bool
    worst_violation: float
    worst_witness: tuple | None
    first_witness: tuple | None
    x_max: float
    samples: int
    violations: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "passed": self.passed,
            "worst_violation": self.worst_violation,
            "worst_witness": self.worst_witness,
            "first_witness": self.first_witness,
            "x_max": self.x_max,
            "samples": self.samples,
            "violations": self.violations,
        }


def verify_split(split: MonotoneSplit, x_max: float, samples: int = 2001, tol: float = SPLIT_TOL) -> SplitReport:
    """Sample both parts on [0, x_max] and check sign and monotonicity.

    Witnesses are tuples ``(part, clause, x_left, x_right)``; for the sign
    clause both x entries are the offending sample. ``first_witness`` is the
    leftmost violation in scan order, ``worst_witness`` the largest one.
    """
    if not x_max > 0:
        raise ValueError("x_max must be positive")
    if samples < 2:
        raise ValueError("samples must be >= 2")
    xs = np.linspace(0.0, float(x_max), samples)
    candidates = []  # (violation, scan_position, witness)
    violations = {}
    for name, sign in (("f_up", 1.0), ("f_down", -1.0)):
        vals = split.up(xs) if name == "f_up" else split.down(xs)
        neg = np.maximum(-vals, 0.0)
        # nondecreasing: v[i] - v[i+1] <= 0; nonincreasing: v[i+1] - v[i] <= 0
        mono = np.maximum(sign * (vals[:-1] - vals[1:]), 0.0)
        violations[name] = {"sign": float(neg.max()), "monotone": float(mono.max())}
        for clause, arr in (("sign", neg), ("monotone", mono)):
            over = np.flatnonzero(arr > tol)
            if over.size:
                i_first = int(over[0])
                i_worst = int(np.argmax(arr))
                wit = lambda i: (name, clause, float(xs[i]), float(xs[i + 1] if clause == "monotone" else xs[i]))  # noqa: E731
                candidates.append((float(arr[i_worst]), i_first, wit(i_first), wit(i_worst)))
    worst = max((v for part in violations.values() for v in part.values()), default=0.0)
    if not candidates:
        return SplitReport(True, worst, None, None, float(x_max), samples, violations)
    first = min(candidates, key=lambda c: c[1])
    worst_c = max(candidates, key=lambda c: c[0])
    return SplitReport(False, worst, worst_c[3], first[2], float(x_max), samples, violations)

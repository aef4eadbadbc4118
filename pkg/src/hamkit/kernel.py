"""Piecewise-polynomial kernels G(t, tau) split along the crease tau = t.

A branch is a coefficient table ``c[i][j]`` multiplying ``t**i * tau**j``.
The lower branch is used for ``tau <= t``, the upper branch for ``t <= tau``.
Coefficients are kept both as floats (for fast vectorised evaluation) and,
when every entry is rational, as exact ``Fraction`` tables so that row
integrals of polynomial kernels can be reported as exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "Interval",
    "Kernel",
    "as_exact",
    "lidstone_kernel",
    "reflected_eval",
]


def as_exact(value) -> Fraction | None:
    """Return ``value`` as a Fraction if it is exactly rational, else None.

    Strings are accepted in decimal or ``p/q`` form. Floats are NOT converted:
    a float carries no record of the rational the user meant.
    """
    if isinstance(value, bool):
        return None
    if isinstance(value, (Fraction, int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            return None
    return None


@dataclass(frozen=True)
class Interval:
    t1: float | Fraction
    t2: float | Fraction

    def __post_init__(self):
        if not self.t1 < self.t2:
            raise ValueError(f"interval needs t1 < t2, got [{self.t1}, {self.t2}]")

    def midpoint(self):
        return (self.t1 + self.t2) / 2

    def quarter(self):
        return (3 * self.t1 + self.t2) / 4

    def eighth(self):
        return (7 * self.t1 + self.t2) / 8

    def reflect(self, t):
        return self.t2 - (t - self.t1)

    @property
    def length(self):
        return self.t2 - self.t1

    def contains(self, t) -> bool:
        return bool(self.t1 <= t <= self.t2)


def _table(coeffs: Sequence[Sequence]) -> tuple[tuple, ...]:
    rows = tuple(tuple(row) for row in coeffs)
    if not rows or not any(rows):
        raise ValueError("a kernel branch needs at least one coefficient")
    width = max(len(r) for r in rows)
    return tuple(r + (0,) * (width - len(r)) for r in rows)


def _horner_tau_then_t(table: np.ndarray, t, tau):
    # inner Horner in tau for each power of t, then Horner in t
    acc = 0.0
    for i in range(table.shape[0] - 1, -1, -1):
        row = table[i]
        inner = 0.0
        for j in range(row.shape[0] - 1, -1, -1):
            inner = inner * tau + row[j]
        acc = acc * t + inner
    return acc


@dataclass(frozen=True, eq=False)
class Kernel:
    """Two-branch polynomial kernel on ``domain x domain``.

    Construct with :meth:`from_coefficients`; the dataclass fields hold the
    normalised tables.
    """

    domain: Interval
    k_exponent: float
    lower: np.ndarray
    upper: np.ndarray
    name: str = "kernel"
    lower_exact: tuple | None = field(default=None, repr=False)
    upper_exact: tuple | None = field(default=None, repr=False)
    k_exact: Fraction | None = field(default=None, repr=False)

    @classmethod
    def from_coefficients(cls, lower, upper, t1=0, t2=1, k=1, name="kernel", check_crease=True):
        """Build a kernel from two coefficient tables (rows = powers of t).

        Entries may be ints, Fractions, ``"p/q"`` strings or floats. The exact
        tables are only kept when every entry (and the domain) is rational.
        """
        lo, up = _table(lower), _table(upper)
        lo_ex = tuple(tuple(as_exact(c) for c in r) for r in lo)
        up_ex = tuple(tuple(as_exact(c) for c in r) for r in up)
        exact = all(c is not None for r in lo_ex + up_ex for c in r)

        e1, e2 = as_exact(t1), as_exact(t2)
        if e1 is not None and e2 is not None:
            domain = Interval(e1, e2)
        else:
            domain = Interval(float(t1), float(t2))
            exact = False

        k_float = float(Fraction(k) if isinstance(k, str) else k)
        if not k_float > 0:
            raise ValueError(f"k_exponent must be positive, got {k}")

        def to_float(tab):
            return np.array([[float(Fraction(c)) if isinstance(c, str) else float(c) for c in r] for r in tab])

        kern = cls(
            domain=domain,
            k_exponent=k_float,
            lower=to_float(lo),
            upper=to_float(up),
            name=name,
            lower_exact=lo_ex if exact else None,
            upper_exact=up_ex if exact else None,
            k_exact=as_exact(k),
        )
        if check_crease:
            kern.check_crease()
        return kern

    @property
    def is_exact(self) -> bool:
        return self.lower_exact is not None

    @property
    def degree(self) -> int:
        """Largest total degree in tau over both branches."""
        return max(self.lower.shape[1], self.upper.shape[1]) - 1

    def check_crease(self, samples: int = 201, rtol: float = 1e-12) -> float:
        """Raise ValueError if the branches disagree on tau = t; return worst gap."""
        t = np.linspace(float(self.domain.t1), float(self.domain.t2), samples)
        lo = _horner_tau_then_t(self.lower, t, t)
        up = _horner_tau_then_t(self.upper, t, t)
        gap = np.abs(lo - up) - rtol * (1 + np.abs(up))
        worst = int(np.argmax(gap))
        if gap[worst] > 0:
            raise ValueError(
                f"kernel {self.name!r}: branches disagree on the crease at t={t[worst]!r} "
                f"(lower={lo[worst]!r}, upper={up[worst]!r})"
            )
        return float(np.max(np.abs(lo - up)))

    def _check_domain(self, name, v):
        a, b = float(self.domain.t1), float(self.domain.t2)
        arr = np.asarray(v, dtype=float)
        bad = ~((arr >= a) & (arr <= b))
        if np.any(bad):
            off = arr[bad].flat[0] if arr.ndim else float(arr)
            raise DomainError(f"{name}={off!r} outside kernel domain [{a}, {b}]", coordinate=(name, float(off)))

    def __call__(self, t, tau):
        return self.eval(t, tau)

    def eval(self, t, tau):
        """Evaluate G(t, tau); broadcasts over numpy arrays."""
        self._check_domain("t", t)
        self._check_domain("tau", tau)
        t_arr = np.asarray(t, dtype=float)
        tau_arr = np.asarray(tau, dtype=float)
        if t_arr.ndim == 0 and tau_arr.ndim == 0:
            table = self.lower if tau_arr <= t_arr else self.upper
            return float(_horner_tau_then_t(table, float(t_arr), float(tau_arr)))
        t_b, tau_b = np.broadcast_arrays(t_arr, tau_arr)
        lo = _horner_tau_then_t(self.lower, t_b, tau_b)
        up = _horner_tau_then_t(self.upper, t_b, tau_b)
        return np.where(tau_b <= t_b, lo, up)

    def eval_branch(self, branch: str, t, tau):
        """Evaluate one branch without the crease test (no domain check)."""
        table = self.lower if branch == "lower" else self.upper
        t_b, tau_b = np.broadcast_arrays(np.asarray(t, float), np.asarray(tau, float))
        return _horner_tau_then_t(table, t_b, tau_b)

    def row_coefficients(self, t, branch: str) -> list[Fraction]:
        """Exact coefficients in tau of the given branch at fixed rational t."""
        table = self.lower_exact if branch == "lower" else self.upper_exact
        if table is None:
            raise ValueError(f"kernel {self.name!r} has no exact coefficient table")
        t = Fraction(t)
        width = len(table[0])
        out = [Fraction(0)] * width
        tp = Fraction(1)
        for row in table:
            for j, c in enumerate(row):
                out[j] += c * tp
            tp *= t
        return out


def reflected_eval(kernel: Kernel, t, tau):
    """G evaluated at the reflected point (T2 - t + T1, T2 - tau + T1)."""
    kernel._check_domain("t", t)
    kernel._check_domain("tau", tau)
    a, b = float(kernel.domain.t1), float(kernel.domain.t2)
    rt = np.clip(b - (np.asarray(t, float) - a), a, b)
    rtau = np.clip(b - (np.asarray(tau, float) - a), a, b)
    if rt.ndim == 0 and rtau.ndim == 0:
        return kernel.eval(float(rt), float(rtau))
    return kernel.eval(rt, rtau)


# Green's function of x'''' = f with x(0) = x''(0) = x(1) = x''(1) = 0.
_F = Fraction
_LIDSTONE_UPPER = (  # t <= tau: (tau^3 t - 3 tau^2 t + tau t^3 + 2 tau t - t^3) / 6
    (0, 0, 0, 0),
    (0, _F(2, 6), _F(-3, 6), _F(1, 6)),
    (0, 0, 0, 0),
    (_F(-1, 6), _F(1, 6), 0, 0),
)
_LIDSTONE_LOWER = (  # tau <= t: (tau^3 t - tau^3 + tau t^3 - 3 tau t^2 + 2 tau t) / 6
    (0, 0, 0, _F(-1, 6)),
    (0, _F(2, 6), 0, _F(1, 6)),
    (0, _F(-3, 6), 0, 0),
    (0, _F(1, 6), 0, 0),
)


def lidstone_kernel() -> Kernel:
    """Built-in Lidstone Green's function on [0, 1] with k = 1."""
    return Kernel.from_coefficients(_LIDSTONE_LOWER, _LIDSTONE_UPPER, 0, 1, k=1, name="lidstone")

"""Grid scans for the kernel hypotheses H1-H5 and the integrated H3 bound.

Each check evaluates the kernel on equally spaced nodes (endpoints included)
and reports the smallest signed margin ``rhs - lhs`` of its inequality. A
check passes when that margin is at least ``-tol``. Witnesses are node
coordinates; ties resolve to the lexicographically smallest witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernel import Kernel
from .quadrature import QuadratureConfig, kernel_row_integral

__all__ = [
    "HypothesisReport",
    "check_h1",
    "check_h2",
    "check_h3",
    "check_h4",
    "check_h5",
    "check_gprop",
    "check_all",
    "REQUIRED",
    "DEFAULT_GRID",
    "DEFAULT_TOL",
]

DEFAULT_GRID = 101
DEFAULT_TOL = 1e-10

# hypotheses each theorem variant relies on
REQUIRED = {
    "general": ("H1", "H2", "H3"),
    "symmetric": ("H1", "H3", "H4i", "H4ii", "H5"),
}


@dataclass
class HypothesisReport:
    hypothesis: str
    passed: bool
    worst_margin: float
    witness: tuple | None
    grid_size: int
    tol: float
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "hypothesis": self.hypothesis,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "witness": self.witness,
            "grid_size": self.grid_size,
            "tol": self.tol,
            "detail": self.detail,
        }


def _grid(kernel: Kernel, n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("grid_size must be >= 2")
    return np.linspace(float(kernel.domain.t1), float(kernel.domain.t2), n)


def _values(kernel, g):
    return kernel.eval(g[:, None], g[None, :])  # [t, tau]


def _reduce(name, margins, axes_values, kernel_n, tol, **detail):
    """Worst margin over an n-d array (``inf`` marks excluded entries)."""
    flat = margins.ravel()
    if flat.size == 0 or not np.any(np.isfinite(flat)):
        return HypothesisReport(name, True, float("inf"), None, kernel_n, tol, detail)
    i = int(np.argmin(flat))  # C order = lexicographic in the witness axes
    idx = np.unravel_index(i, margins.shape)
    witness = tuple(float(vals[j]) for vals, j in zip(axes_values, idx))
    worst = float(flat[i])
    detail.setdefault("violations", int(np.count_nonzero(flat < -tol)))
    return HypothesisReport(name, worst >= -tol, worst, witness, kernel_n, tol, detail)


def check_h1(kernel: Kernel, grid_size: int = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> HypothesisReport:
    """Nonnegativity plus non-triviality.

    Non-triviality enters the margin as ``max G - 2 tol`` so that the report
    passes exactly when ``max G >= tol``.
    """
    g = _grid(kernel, grid_size)
    vals = _values(kernel, g)
    i = int(np.argmin(vals))
    j = int(np.argmax(vals))
    min_g, max_g = float(vals.flat[i]), float(vals.flat[j])
    n = grid_size
    nonneg = (min_g, (float(g[i // n]), float(g[i % n])))
    nontrivial = (max_g - 2 * tol, (float(g[j // n]), float(g[j % n])))
    worst, witness = min(nonneg, nontrivial, key=lambda m: m[0])
    detail = {"min": min_g, "max": max_g, "nonnegative": min_g >= -tol, "nontrivial": max_g - 2 * tol >= -tol}
    return HypothesisReport("H1", worst >= -tol, worst, witness, grid_size, tol, detail)


def check_h2(kernel: Kernel, grid_size: int = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> HypothesisReport:
    """Rows nondecreasing in t. Witness (t1, t2, tau)."""
    g = _grid(kernel, grid_size)
    G = _values(kernel, g)
    margin = G[None, :, :] - G[:, None, :]  # [t1, t2, tau]
    i1, i2 = np.indices((grid_size, grid_size))
    margin = np.where((i1 <= i2)[:, :, None], margin, np.inf)
    return _reduce("H2", margin, (g, g, g), grid_size, tol)


def check_h3(kernel: Kernel, grid_size: int = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> HypothesisReport:
    """(y-T1)^k G(w,tau) <= (w-T1)^k G(y,tau) for y <= w. Witness (y, w, tau)."""
    g = _grid(kernel, grid_size)
    G = _values(kernel, g)
    s = (g - float(kernel.domain.t1)) ** kernel.k_exponent
    margin = s[None, :, None] * G[:, None, :] - s[:, None, None] * G[None, :, :]  # [y, w, tau]
    iy, iw = np.indices((grid_size, grid_size))
    margin = np.where((iy <= iw)[:, :, None], margin, np.inf)
    return _reduce("H3", margin, (g, g, g), grid_size, tol, k=kernel.k_exponent)


def check_h4(kernel: Kernel, grid_size: int = DEFAULT_GRID, tol: float = DEFAULT_TOL):
    """Both parts of H4 on the left half. Witnesses (t1, t2, tau).

    Node reflection uses index reversal, which is exact on the symmetric
    equally spaced grid.
    """
    g = _grid(kernel, grid_size)
    G = _values(kernel, g)
    n = grid_size
    half = (n - 1) // 2  # last node index with t <= midpoint
    i1, i2, j = np.indices((half + 1, half + 1, n))
    ordered = i1 <= i2

    Gl = G[: half + 1]  # rows t in [T1, midpoint]
    margin_i = Gl[None, :, :] - Gl[:, None, :]
    in_range = ordered & (j >= i2) & (j <= n - 1 - i2)
    rep_i = _reduce("H4i", np.where(in_range, margin_i, np.inf), (g, g, g), n, tol)

    Gr = G[::-1][: half + 1]  # rows at reflected t
    paired = Gl + Gr
    margin_ii = paired[None, :, :] - paired[:, None, :]
    rep_ii = _reduce("H4ii", np.where(ordered & (j <= i2), margin_ii, np.inf), (g, g, g), n, tol)
    return rep_i, rep_ii


def check_h5(kernel: Kernel, grid_size: int = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> HypothesisReport:
    """Reflection symmetry G(T2-t+T1, T2-tau+T1) = G(t, tau). Witness (t, tau)."""
    g = _grid(kernel, grid_size)
    G = _values(kernel, g)
    defect = np.abs(G[::-1, ::-1] - G)
    return _reduce("H5", -defect, (g, g), grid_size, tol)


def check_gprop(
    kernel: Kernel,
    grid_size: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
    qcfg: QuadratureConfig | None = None,
) -> HypothesisReport:
    """H3 integrated over tau, using crease-aware row integrals. Witness (y, w)."""
    g = _grid(kernel, grid_size)
    a, b = kernel.domain.t1, kernel.domain.t2
    rows = np.array([kernel_row_integral(kernel, t, a, b, qcfg) for t in g])
    s = (g - float(a)) ** kernel.k_exponent
    margin = s[None, :] * rows[:, None] - s[:, None] * rows[None, :]  # [y, w]
    iy, iw = np.indices((grid_size, grid_size))
    return _reduce("gprop", np.where(iy <= iw, margin, np.inf), (g, g), grid_size, tol)


def check_all(
    kernel: Kernel,
    grid_size: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
    qcfg: QuadratureConfig | None = None,
) -> dict[str, HypothesisReport]:
    h4i, h4ii = check_h4(kernel, grid_size, tol)
    return {
        "H1": check_h1(kernel, grid_size, tol),
        "H2": check_h2(kernel, grid_size, tol),
        "H3": check_h3(kernel, grid_size, tol),
        "H4i": h4i,
        "H4ii": h4ii,
        "H5": check_h5(kernel, grid_size, tol),
        "gprop": check_gprop(kernel, grid_size, tol, qcfg),
    }

"""Nystrom discretisation of T = R + S and damped Picard iteration.

The unknown is stored at grid nodes and linearly interpolated in between.
Every grid cell is one Gauss-Legendre panel, so the panel breaks line up
with both the x-grid and the crease tau = t_i (t_i is itself a node), and
the piecewise-linear interpolant is integrated without interpolation-induced
quadrature error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone import SYMMETRIC, ConeSpec, GridFunction, check_membership, functionals
from .errors import DomainError, EvaluationError
from .kernel import Interval, Kernel
from .monotone import MonotoneSplit
from .quadrature import QuadratureConfig, gauss_legendre

__all__ = [
    "SolverConfig",
    "SolutionResult",
    "NystromOperator",
    "make_grid",
    "apply_T",
    "apply_R",
    "apply_S",
    "solve_fixed_point",
    "verify_solution",
    "check_cone_mapping",
    "NEGATIVE_CLAMP",
    "refine",
]

NEGATIVE_CLAMP = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    grid_points: int = 129
    max_iterations: int = 500
    residual_tol: float = 1e-10
    damping: float = 1.0
    divergence_factor: float = 1e6

    def __post_init__(self):
        if self.grid_points < 2:
            raise ValueError("grid_points must be >= 2")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")


def make_grid(domain: Interval, grid_points: int) -> np.ndarray:
    """Equally spaced nodes plus the focal and right points of both cones."""
    a, b = float(domain.t1), float(domain.t2)
    nodes = np.linspace(a, b, grid_points)
    gap = 1e-12 * (b - a)
    for p in (domain.eighth(), domain.quarter(), domain.midpoint()):
        p = float(p)
        if np.min(np.abs(nodes - p)) > gap:
            nodes = np.sort(np.append(nodes, p))
    return nodes


class NystromOperator:
    """Quadrature weights ``W[i, q] = G(s_i, tau_q) w_q`` for a fixed grid.

    The evaluation points ``s_i`` default to the grid nodes; passing other
    ``targets`` gives the Nystrom extension of the same discrete operator.
    """

    def __init__(self, kernel: Kernel, nodes, qcfg: QuadratureConfig | None = None, targets=None):
        qcfg = qcfg or QuadratureConfig()
        self.kernel = kernel
        self.nodes = np.asarray(nodes, dtype=float)
        self.targets = self.nodes if targets is None else np.asarray(targets, dtype=float)
        x, w = gauss_legendre(qcfg.nodes_per_panel)
        lam = 0.5 * (x + 1.0)
        h = np.diff(self.nodes)
        self.lam = lam
        self.tau = (self.nodes[:-1, None] + h[:, None] * lam[None, :]).ravel()
        weights = (0.5 * h[:, None] * w[None, :]).ravel()
        self.weights = weights * kernel.eval(self.targets[:, None], self.tau[None, :])

    def interpolate(self, values) -> np.ndarray:
        """Values of the piecewise-linear interpolant at the quadrature points."""
        v = np.asarray(values, dtype=float)
        return ((1.0 - self.lam)[None, :] * v[:-1, None] + self.lam[None, :] * v[1:, None]).ravel()

    def apply(self, fn, values) -> np.ndarray:
        return self.weights @ fn(self.interpolate(values))


def _prepare(x: GridFunction, kernel: Kernel) -> np.ndarray:
    if not x.on_interval(kernel.domain):
        raise ValueError("grid function does not span the kernel domain")
    v = np.array(x.values)
    neg = v < 0
    # roundoff is proportional to the size of x, so the clamp is relative
    floor = -NEGATIVE_CLAMP * max(1.0, float(np.max(np.abs(v))))
    if np.any(v < floor):
        i = int(np.flatnonzero(v < floor)[0])
        raise DomainError(f"x({x.nodes[i]!r}) = {v[i]!r} is negative", coordinate=float(x.nodes[i]))
    v[neg] = 0.0
    return v


def _apply(part: str, kernel, split: MonotoneSplit, x: GridFunction, qcfg, op=None) -> GridFunction:
    v = _prepare(x, kernel)
    op = op or NystromOperator(kernel, x.nodes, qcfg)
    fn = {"T": split.__call__, "R": split.up, "S": split.down}[part]
    return GridFunction(x.nodes, op.apply(fn, v))


def apply_T(kernel: Kernel, split: MonotoneSplit, x: GridFunction, qcfg: QuadratureConfig | None = None, op=None):
    """(Tx)(t_i) = integral of G(t_i, tau) f(x(tau)) over the domain."""
    return _apply("T", kernel, split, x, qcfg, op)


def apply_R(kernel: Kernel, split: MonotoneSplit, x: GridFunction, qcfg: QuadratureConfig | None = None, op=None):
    return _apply("R", kernel, split, x, qcfg, op)


def apply_S(kernel: Kernel, split: MonotoneSplit, x: GridFunction, qcfg: QuadratureConfig | None = None, op=None):
    return _apply("S", kernel, split, x, qcfg, op)


@dataclass
class SolutionResult:
    x: GridFunction
    residual: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)
    diverged: bool = False
    notes: list = field(default_factory=list)

    def summary(self):
        return {
            "converged": self.converged,
            "diverged": self.diverged,
            "iterations": self.iterations,
            "residual": self.residual,
            "grid_points": len(self.x),
            "notes": list(self.notes),
        }


def solve_fixed_point(
    kernel: Kernel,
    split: MonotoneSplit,
    cfg: SolverConfig | None = None,
    initial: GridFunction | str | None = None,
    qcfg: QuadratureConfig | None = None,
    b: float = 1.0,
) -> SolutionResult:
    """Iterate x <- (1 - damping) x + damping T x until the sup-norm residual
    |x - T x| drops below ``cfg.residual_tol``.

    ``initial`` is a GridFunction, ``"zero"`` (default) or ``"linear"``
    (t -> b (t - T1) / (T2 - T1)). Non-convergence and divergence are
    reported on the result, not raised.
    """
    cfg = cfg or SolverConfig()
    dom = kernel.domain
    if isinstance(initial, GridFunction):
        x = initial
    else:
        nodes = make_grid(dom, cfg.grid_points)
        if initial in (None, "zero"):
            x = GridFunction.zeros(nodes)
        elif initial == "linear":
            t1, t2 = float(dom.t1), float(dom.t2)
            x = GridFunction(nodes, b * (nodes - t1) / (t2 - t1))
        else:
            raise ValueError(f"unknown initial iterate {initial!r}")
    op = NystromOperator(kernel, x.nodes, qcfg)

    history = []
    r0 = None
    it = 0
    while True:
        try:
            tx = apply_T(kernel, split, x, op=op)
        except (EvaluationError, DomainError) as exc:
            raise type(exc)(f"iteration {it}: {exc}") from exc
        residual = float(np.max(np.abs(x.values - tx.values)))
        history.append(residual)
        if r0 is None:
            r0 = residual
        if residual <= cfg.residual_tol:
            return SolutionResult(x, residual, it, True, history)
        if not np.isfinite(residual) or residual > cfg.divergence_factor * (1.0 + r0):
            return SolutionResult(x, residual, it, False, history, diverged=True,
                                  notes=[f"diverged at iteration {it}: residual {residual!r}"])
        if it >= cfg.max_iterations:
            return SolutionResult(x, residual, it, False, history,
                                  notes=[f"max_iterations={cfg.max_iterations} reached"])
        x = GridFunction(x.nodes, (1.0 - cfg.damping) * x.values + cfg.damping * tx.values)
        it += 1


def refine(nodes) -> np.ndarray:
    """Insert cell midpoints: 2n - 1 nodes containing the originals."""
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    out = np.empty(2 * nodes.size - 1)
    out[0::2] = nodes
    out[1::2] = mids
    return out


@dataclass
class SolutionValidation:
    passed: bool
    quadrature_residual: float
    discretisation_residual: float
    positivity: str
    min_interior: float
    membership: dict
    symmetry_defect: float | None
    functionals: dict
    notes: list = field(default_factory=list)

    def to_dict(self):
        return dict(self.__dict__)


def verify_solution(
    kernel: Kernel,
    split: MonotoneSplit,
    result: SolutionResult,
    spec: ConeSpec,
    tol: float = 1e-9,
    qcfg: QuadratureConfig | None = None,
    residual_tol: float = 1e-10,
) -> SolutionValidation:
    """A-posteriori checks on a computed solution.

    Two residuals are reported. ``quadrature_residual`` re-applies T at the
    solution nodes with twice the Gauss points per panel; it must stay below
    ``10 * residual_tol``. ``discretisation_residual`` extends x to a grid
    with twice the cells through the Nystrom formula and measures the
    residual there; it estimates the O(h^2) interpolation error and is
    informational.
    """
    qcfg = qcfg or QuadratureConfig()
    x = result.x
    notes = []

    fine_q = QuadratureConfig(2 * qcfg.nodes_per_panel, qcfg.panels, qcfg.crease_split)
    quad_res = float(np.max(np.abs(apply_T(kernel, split, x, fine_q).values - x.values)))

    fine_nodes = refine(x.nodes)
    extended = NystromOperator(kernel, x.nodes, qcfg, targets=fine_nodes)
    x_fine = GridFunction(fine_nodes, extended.apply(split.__call__, np.maximum(x.values, 0.0)))
    disc_res = float(np.max(np.abs(apply_T(kernel, split, x_fine, qcfg).values - x_fine.values)))

    interior = x.values[1:-1]
    min_interior = float(interior.min()) if interior.size else float(x.values.min())
    if np.all(x.values == 0):
        positivity = "trivial solution"
    elif min_interior > 0:
        positivity = "positive"
    else:
        positivity = "not positive"

    membership = check_membership(x, spec, tol)
    defect = None
    if spec.variant == SYMMETRIC:
        t1 = float(spec.interval.t1)
        defect = float(np.max(np.abs(x(float(spec.interval.t2) - (x.nodes - t1)) - x.values)))

    if not result.converged:
        notes.append("solution did not converge; checks describe the last iterate")
    passed = (
        result.converged
        and quad_res <= 10 * residual_tol
        and positivity == "positive"
        and membership.passed
        and (defect is None or defect <= tol)
    )
    return SolutionValidation(
        passed,
        quad_res,
        disc_res,
        positivity,
        min_interior,
        membership.to_dict(),
        defect,
        functionals(x, spec),
        notes,
    )


@dataclass
class ConeMappingReport:
    passed: bool
    checked: int
    rejected: list
    failures: list

    def to_dict(self):
        return dict(self.__dict__)


def check_cone_mapping(
    kernel: Kernel,
    split: MonotoneSplit,
    spec: ConeSpec,
    sample_functions,
    tol: float = 1e-9,
    qcfg: QuadratureConfig | None = None,
) -> ConeMappingReport:
    """Apply T, R and S to each cone member and check the images stay in the cone.

    Samples that are not cone members are listed under ``rejected`` and
    skipped.
    """
    rejected, failures = [], []
    checked = 0
    for idx, x in enumerate(sample_functions):
        pre = check_membership(x, spec, tol)
        if not pre.passed:
            rejected.append(idx)
            continue
        op = NystromOperator(kernel, x.nodes, qcfg)
        for name, fn in (("T", apply_T), ("R", apply_R), ("S", apply_S)):
            image = fn(kernel, split, x, op=op)
            rep = check_membership(image, spec, tol)
            if not rep.passed:
                bad = {k: v for k, v in rep.to_dict()["clauses"].items() if not v["passed"]}
                failures.append({"sample": idx, "operator": name, "clauses": bad})
        checked += 1
    return ConeMappingReport(not failures, checked, rejected, failures)

"""Numerical checks for positive solutions of Hammerstein integral equations.

x(t) = integral over [T1, T2] of G(t, tau) f(x(tau)) dtau, with f split into
nondecreasing and nonincreasing parts.
"""

__version__ = "0.1.0"

from .certificate import (
    BoxParams,
    Certificate,
    SearchGrid,
    Thresholds,
    certify,
    compute_thresholds,
    corollary_relations,
    search_box_params,
    simplified_certify,
)
from .cone import ConeSpec, GridFunction, check_membership, functionals
from .errors import ConfigError, DegenerateKernelError, DomainError, EvaluationError, HamkitError
from .expr import parse_expression
from .hypotheses import (
    HypothesisReport,
    check_all,
    check_gprop,
    check_h1,
    check_h2,
    check_h3,
    check_h4,
    check_h5,
)
from .kernel import Interval, Kernel, lidstone_kernel, reflected_eval
from .monotone import MonotoneSplit, eval_f, verify_split
from .quadrature import (
    QuadratureConfig,
    integrate,
    kernel_row_integral,
    symmetrized_row_integral,
)
from .solver import (
    SolutionResult,
    SolverConfig,
    apply_R,
    apply_S,
    apply_T,
    check_cone_mapping,
    solve_fixed_point,
    verify_solution,
)

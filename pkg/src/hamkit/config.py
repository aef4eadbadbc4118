"""INI problem configuration.

Recognised sections and keys (all optional except ``[split]``)::

    [problem]     variant = general | symmetric
    [kernel]      builtin = lidstone
                  -- or --
                  t1, t2, k, name,
                  lower = <row>; <row>; ...   (row i holds coefficients of t^i tau^j, j = 0, 1, ...)
                  upper = <row>; <row>; ...   (entries comma separated; decimals or p/q)
    [split]       f_up, f_down (expressions in x), x_max, samples
    [params]      a, b, c, d   (omit the section to search; b and c alone mean a = d = 0)
    [quadrature]  nodes_per_panel, panels, crease_split
    [solver]      grid_points, max_iterations, residual_tol, damping, divergence_factor,
                  initial = zero | linear
    [checks]      grid, tol, membership_tol, strictness_eps
    [output]      dir

Numbers written as decimals or ``p/q`` are kept as exact fractions where
the value feeds an exact computation (kernel coefficients, domain, k and
box parameters).
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction

from .cone import GENERAL, SYMMETRIC
from .errors import ConfigError
from .expr import ExpressionError, parse_expression
from .kernel import Kernel, lidstone_kernel
from .quadrature import QuadratureConfig
from .solver import SolverConfig

__all__ = ["ProblemConfig", "KernelSpec", "parse_config", "load_config", "parse_number", "BUILTIN_KERNELS"]

BUILTIN_KERNELS = {"lidstone": lidstone_kernel}


def parse_number(text: str, key: str = "value") -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{key}: cannot parse number {text!r}") from None


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_table(text: str, key: str) -> tuple:
    rows = []
    for row in text.split(";"):
        row = row.strip()
        if row:
            rows.append(tuple(str(parse_number(c, key)) for c in row.split(",")))
    if not rows:
        raise ConfigError(f"{key}: empty coefficient table")
    return tuple(rows)


@dataclass(frozen=True)
class KernelSpec:
    builtin: str | None = "lidstone"
    t1: Fraction = Fraction(0)
    t2: Fraction = Fraction(1)
    k: Fraction = Fraction(1)
    lower: tuple | None = None
    upper: tuple | None = None
    name: str = "custom"

    def build(self) -> Kernel:
        if self.builtin is not None:
            return BUILTIN_KERNELS[self.builtin]()
        try:
            return Kernel.from_coefficients(self.lower, self.upper, self.t1, self.t2, self.k, self.name)
        except ValueError as exc:
            raise ConfigError(f"[kernel]: {exc}") from exc


@dataclass(frozen=True)
class ProblemConfig:
    f_up: str
    f_down: str
    variant: str = SYMMETRIC
    kernel: KernelSpec = field(default_factory=KernelSpec)
    params: dict | None = None  # keys among a, b, c, d -> Fraction
    x_max: Fraction | None = None
    split_samples: int = 2001
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    initial: str = "zero"
    grid: int = 101
    tol: float = 1e-10
    membership_tol: float = 1e-9
    strictness_eps: float = 0.0
    out_dir: str | None = None

    def __post_init__(self):
        if self.variant not in (GENERAL, SYMMETRIC):
            raise ConfigError(f"[problem] variant must be general or symmetric, got {self.variant!r}")
        for name, src in (("f_up", self.f_up), ("f_down", self.f_down)):
            try:
                parse_expression(src)
            except ExpressionError as exc:
                raise ConfigError(f"[split] {name}: {exc}") from exc
        if self.initial not in ("zero", "linear"):
            raise ConfigError(f"[solver] initial must be zero or linear, got {self.initial!r}")

    def replace(self, **changes) -> "ProblemConfig":
        return dataclasses.replace(self, **changes)

    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp["problem"] = {"variant": self.variant}
        ks = self.kernel
        if ks.builtin is not None:
            cp["kernel"] = {"builtin": ks.builtin}
        else:
            table = lambda rows: "; ".join(", ".join(r) for r in rows)  # noqa: E731
            cp["kernel"] = {
                "name": ks.name, "t1": _fmt(ks.t1), "t2": _fmt(ks.t2), "k": _fmt(ks.k),
                "lower": table(ks.lower), "upper": table(ks.upper),
            }
        split = {"f_up": self.f_up, "f_down": self.f_down, "samples": str(self.split_samples)}
        if self.x_max is not None:
            split["x_max"] = _fmt(self.x_max)
        cp["split"] = split
        if self.params is not None:
            cp["params"] = {k: _fmt(v) for k, v in self.params.items()}
        q = self.quadrature
        cp["quadrature"] = {"nodes_per_panel": str(q.nodes_per_panel), "panels": str(q.panels),
                            "crease_split": _fmt(q.crease_split)}
        s = self.solver
        cp["solver"] = {
            "grid_points": str(s.grid_points), "max_iterations": str(s.max_iterations),
            "residual_tol": _fmt(s.residual_tol), "damping": _fmt(s.damping),
            "divergence_factor": _fmt(s.divergence_factor), "initial": self.initial,
        }
        cp["checks"] = {"grid": str(self.grid), "tol": _fmt(self.tol),
                        "membership_tol": _fmt(self.membership_tol),
                        "strictness_eps": _fmt(self.strictness_eps)}
        if self.out_dir is not None:
            cp["output"] = {"dir": self.out_dir}
        lines = []
        for section in cp.sections():
            lines.append(f"[{section}]")
            lines.extend(f"{k} = {v}" for k, v in cp[section].items())
            lines.append("")
        return "\n".join(lines)


_KNOWN = {
    "problem": {"variant"},
    "kernel": {"builtin", "t1", "t2", "k", "lower", "upper", "name"},
    "split": {"f_up", "f_down", "x_max", "samples"},
    "params": {"a", "b", "c", "d"},
    "quadrature": {"nodes_per_panel", "panels", "crease_split"},
    "solver": {"grid_points", "max_iterations", "residual_tol", "damping", "divergence_factor", "initial"},
    "checks": {"grid", "tol", "membership_tol", "strictness_eps"},
    "output": {"dir"},
}


def _int(sec, key, default):
    try:
        return sec.getint(key, default)
    except ValueError:
        raise ConfigError(f"[{sec.name}] {key}: expected an integer, got {sec.get(key)!r}") from None


def _float(sec, key, default):
    if key not in sec:
        return default
    return float(parse_number(sec[key], f"[{sec.name}] {key}"))


def parse_config(text: str) -> ProblemConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    for name in cp.sections():
        if name not in _KNOWN:
            raise ConfigError(f"unknown section [{name}]")
        extra = set(cp[name]) - _KNOWN[name]
        if extra:
            raise ConfigError(f"[{name}]: unknown keys {sorted(extra)}")
    if "split" not in cp or not {"f_up", "f_down"} <= set(cp["split"]):
        raise ConfigError("[split] must define f_up and f_down")

    empty = configparser.SectionProxy(cp, "DEFAULT")
    sec = lambda name: cp[name] if name in cp else empty  # noqa: E731

    k = sec("kernel")
    if "builtin" in k:
        if {"lower", "upper"} & set(k):
            raise ConfigError("[kernel]: give either builtin or lower/upper tables, not both")
        if k["builtin"] not in BUILTIN_KERNELS:
            raise ConfigError(f"[kernel]: unknown builtin {k['builtin']!r}")
        kspec = KernelSpec(builtin=k["builtin"])
    elif "lower" in k or "upper" in k:
        if not {"lower", "upper"} <= set(k):
            raise ConfigError("[kernel]: both lower and upper tables are required")
        kspec = KernelSpec(
            builtin=None,
            t1=parse_number(k.get("t1", "0"), "[kernel] t1"),
            t2=parse_number(k.get("t2", "1"), "[kernel] t2"),
            k=parse_number(k.get("k", "1"), "[kernel] k"),
            lower=_parse_table(k["lower"], "[kernel] lower"),
            upper=_parse_table(k["upper"], "[kernel] upper"),
            name=k.get("name", "custom"),
        )
        kspec.build()  # surface crease/table problems as config errors
    else:
        kspec = KernelSpec()

    params = None
    if "params" in cp:
        p = cp["params"]
        params = {key: parse_number(p[key], f"[params] {key}") for key in "abcd" if key in p}
        if not {"b", "c"} <= set(params):
            raise ConfigError("[params] needs at least b and c")

    s, q, ch, sp = sec("solver"), sec("quadrature"), sec("checks"), sec("split")
    try:
        quad = QuadratureConfig(
            _int(q, "nodes_per_panel", 16), _int(q, "panels", 8), q.getboolean("crease_split", True)
        )
        solver = SolverConfig(
            _int(s, "grid_points", 129), _int(s, "max_iterations", 500), _float(s, "residual_tol", 1e-10),
            _float(s, "damping", 1.0), _float(s, "divergence_factor", 1e6),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    return ProblemConfig(
        f_up=sp["f_up"],
        f_down=sp["f_down"],
        variant=sec("problem").get("variant", SYMMETRIC),
        kernel=kspec,
        params=params,
        x_max=parse_number(sp["x_max"], "[split] x_max") if "x_max" in sp else None,
        split_samples=_int(sp, "samples", 2001),
        quadrature=quad,
        solver=solver,
        initial=s.get("initial", "zero"),
        grid=_int(ch, "grid", 101),
        tol=_float(ch, "tol", 1e-10),
        membership_tol=_float(ch, "membership_tol", 1e-9),
        strictness_eps=_float(ch, "strictness_eps", 0.0),
        out_dir=sec("output").get("dir"),
    )


def load_config(path) -> ProblemConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

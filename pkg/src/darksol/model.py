"""Problem data: grids, sampled profiles, periodic coefficients.

Everything here is immutable. Arrays are copied on construction and
marked read-only, so downstream solvers can hand profiles around
without defensive copies. A coefficient is stored as one period of
samples; extensions to larger grids are pure integer index maps, so
periodicity of extended data is exact in floating point.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import GridMismatchError, ValidationError
from .exprparse import compile_expression

__all__ = [
    "Grid", "Profile", "Coefficient", "Problem", "UniquenessDiagnostic",
    "make_uniform_grid", "sample_coefficient", "validate_problem",
    "uniqueness_diagnostic",
]

# Relative slack for node alignment checks. Grid spacings that agree to
# this level are treated as the same discretization.
_ALIGN_RTOL = 1e-9


def _frozen_array(values, n=None, name="values"):
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional")
    if n is not None and arr.shape[0] != n:
        raise ValidationError(f"{name} has length {arr.shape[0]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Grid:
    """Uniform one-dimensional grid with n nodes spanning [xmin, xmax]."""

    xmin: float
    xmax: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.xmin) and np.isfinite(self.xmax)):
            raise ValidationError("grid endpoints must be finite")
        if not self.xmax > self.xmin:
            raise ValidationError("grid needs xmax > xmin")
        if not isinstance(self.n, (int, np.integer)) or self.n < 3:
            raise ValidationError("grid needs an integer node count n >= 3")

    @property
    def h(self) -> float:
        return (self.xmax - self.xmin) / (self.n - 1)

    def x(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.n)


def make_uniform_grid(xmin: float, xmax: float, n: int) -> Grid:
    return Grid(xmin=float(xmin), xmax=float(xmax), n=int(n))


@dataclass(frozen=True, eq=False)
class Profile:
    """Real-valued samples on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values",
                           _frozen_array(self.values, self.grid.n))

    def with_values(self, values) -> "Profile":
        return Profile(self.grid, values)


@dataclass(frozen=True, eq=False)
class Coefficient:
    """One period of a T-periodic coefficient, sampled on equispaced nodes.

    `samples[k]` is the value at x = k * T / n_per for k = 0 .. n_per - 1;
    the node at x = T is the wrap-around of node 0 and is not stored.
    """

    samples: np.ndarray
    period: float
    cmin: float = field(init=False)
    cmax: float = field(init=False)

    def __post_init__(self):
        if not (np.isfinite(self.period) and self.period > 0):
            raise ValidationError("coefficient period must be positive")
        arr = _frozen_array(self.samples, name="coefficient samples")
        if arr.shape[0] < 3:
            raise ValidationError("coefficient needs at least 3 samples per period")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "cmin", float(arr.min()))
        object.__setattr__(self, "cmax", float(arr.max()))

    @property
    def n_per(self) -> int:
        return self.samples.shape[0]

    @property
    def h(self) -> float:
        return self.period / self.n_per

    def node_index(self, x: float) -> int:
        """Index of the sample at position x, which must sit on a node."""
        k = round(x / self.h)
        if abs(x - k * self.h) > _ALIGN_RTOL * max(1.0, abs(x)):
            raise GridMismatchError(
                f"x = {x} does not sit on a coefficient node (h = {self.h})")
        return int(k % self.n_per)

    def value_at(self, x: float) -> float:
        return float(self.samples[self.node_index(x)])

    def on_grid(self, grid: Grid) -> np.ndarray:
        """Extend the sampled period onto a commensurate aligned grid.

        The grid spacing must equal the sample spacing and every grid
        node must land on a sample node; the extension is then an exact
        integer index map into the stored period.
        """
        if abs(grid.h - self.h) > _ALIGN_RTOL * self.h:
            raise GridMismatchError(
                f"grid spacing {grid.h} is incommensurate with "
                f"coefficient spacing {self.h}")
        k0 = round(grid.xmin / self.h)
        if abs(grid.xmin - k0 * self.h) > _ALIGN_RTOL * max(1.0, abs(grid.xmin)):
            raise GridMismatchError(
                f"grid origin {grid.xmin} is not aligned with coefficient nodes")
        idx = (k0 + np.arange(grid.n)) % self.n_per
        out = self.samples[idx]
        out.flags.writeable = False
        return out

    def shifted(self, k_nodes: int) -> "Coefficient":
        """Translate by k_nodes samples: result(x) = original(x - k_nodes * h)."""
        return Coefficient(samples=np.roll(self.samples, k_nodes),
                           period=self.period)


def sample_coefficient(source, period: float, n_per_period: int,
                       positive: bool = False,
                       variables: dict | None = None) -> Coefficient:
    """Sample a coefficient from a callable, expression string or array.

    Expression strings may use x plus any names bound in `variables`.
    With positive=True a non-positive sample anywhere is rejected, which
    is the right setting for a defocusing interaction coefficient.
    """
    n_per_period = int(n_per_period)
    if n_per_period < 3:
        raise ValidationError("need at least 3 samples per period")
    if not (np.isfinite(period) and period > 0):
        raise ValidationError("coefficient period must be positive")
    nodes = np.arange(n_per_period) * (period / n_per_period)
    if isinstance(source, str):
        bindings = dict(variables or {})
        expr = compile_expression(source, variables=("x", *bindings))
        values = np.broadcast_to(expr(x=nodes, **bindings), nodes.shape)
    elif callable(source):
        values = np.asarray(source(nodes), dtype=float)
        if values.shape != nodes.shape:
            values = np.broadcast_to(values, nodes.shape)
    else:
        values = np.asarray(source, dtype=float)
        if values.shape != nodes.shape:
            raise ValidationError(
                f"coefficient table has length {values.size}, "
                f"expected {n_per_period}")
    coeff = Coefficient(samples=values, period=period)
    if positive and coeff.cmin <= 0:
        raise ValidationError(
            f"coefficient must be strictly positive, min sample = {coeff.cmin}",
            reason="coefficient_not_positive")
    return coeff


@dataclass(frozen=True)
class UniquenessDiagnostic:
    """Margin of the sufficient condition g_min > g_max / 3.

    When `holds` is false the computed background is still reported, but
    uniqueness of the positive periodic state is not guaranteed by the
    contraction argument, so downstream results carry a flag.
    """

    margin: float
    holds: bool


@dataclass(frozen=True)
class Problem:
    """Stationary-profile problem for one of the two supported models.

    kind = "cubic":           -0.5 phi'' + lam phi + g phi^3 = 0, lam < 0
    kind = "cubic-quintic":    phi'' + (V - lam) phi - g1 phi^3 - phi^5 = 0,
                               lam < min V
    Coefficients g and V are T-periodic; g1 is a constant.
    """

    kind: str
    lam: float
    period: float
    g: Coefficient | None = None
    potential: Coefficient | None = None
    g1: float = 0.0
    diagnostics: UniquenessDiagnostic | None = None

    def __post_init__(self):
        if self.kind not in ("cubic", "cubic-quintic"):
            raise ValidationError(f"unknown problem kind {self.kind!r}")
        if not np.isfinite(self.lam):
            raise ValidationError("lambda must be finite")
        if not (np.isfinite(self.period) and self.period > 0):
            raise ValidationError("period must be positive")
        for coeff in (self.g, self.potential):
            if coeff is not None and abs(coeff.period - self.period) > \
                    _ALIGN_RTOL * self.period:
                raise ValidationError("coefficient period differs from problem period")

    @property
    def is_cubic(self) -> bool:
        return self.kind == "cubic"

    @property
    def n_per(self) -> int:
        coeff = self.g if self.is_cubic else self.potential
        return coeff.n_per


def uniqueness_diagnostic(problem: Problem) -> UniquenessDiagnostic:
    """Evaluate the uniqueness margin for a cubic problem."""
    if not problem.is_cubic:
        raise ValidationError("uniqueness diagnostic applies to the cubic model only")
    margin = problem.g.cmin - problem.g.cmax / 3.0
    return UniquenessDiagnostic(margin=float(margin), holds=bool(margin > 0))


def validate_problem(problem: Problem, grid: Grid | None = None) -> Problem:
    """Check solvability conditions and attach the uniqueness diagnostic.

    Raises ValidationError with a distinct reason for each rejection:
    a sign-definiteness failure of lambda, a non-positive interaction
    coefficient, or a grid incommensurate with the period. Validating
    an already-validated problem returns it unchanged.
    """
    if problem.is_cubic:
        if problem.g is None:
            raise ValidationError("cubic model needs an interaction coefficient g",
                                  reason="missing_coefficient")
        if problem.g.cmin <= 0:
            raise ValidationError(
                f"g must be strictly positive, min sample = {problem.g.cmin}",
                reason="coefficient_not_positive")
        if not problem.lam < 0:
            raise ValidationError("lambda must be negative",
                                  reason="lambda_sign")
    else:
        if problem.potential is None:
            raise ValidationError("cubic-quintic model needs a potential V",
                                  reason="missing_coefficient")
        if not problem.lam < problem.potential.cmin:
            raise ValidationError(
                f"lambda must lie below min V = {problem.potential.cmin}",
                reason="lambda_sign")
    if grid is not None:
        coeff = problem.g if problem.is_cubic else problem.potential
        coeff.on_grid(grid)  # raises GridMismatchError if incommensurate
        span = grid.xmax - grid.xmin
        periods = span / problem.period
        if abs(periods - round(periods)) > _ALIGN_RTOL * max(1.0, periods):
            raise GridMismatchError(
                f"grid span {span} is not an integer number of periods")
    if problem.is_cubic:
        diag = uniqueness_diagnostic(problem)
        if problem.diagnostics == diag:
            return problem
        return replace(problem, diagnostics=diag)
    return problem

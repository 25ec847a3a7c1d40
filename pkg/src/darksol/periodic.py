"""Positive periodic background states.

Two independent routes to the same object: a damped Newton iteration
on the periodic discretization, and a monotone fixed-point iteration
driven from constant sub- and supersolutions. The second is slower but
carries an ordering proof, so it doubles as an oracle for the first.
"""

from dataclasses import dataclass

import numpy as np

from ._banded import solve_cyclic
from .errors import BracketViolation, NonConvergence, ValidationError
from .model import Coefficient, Grid, Problem, Profile

__all__ = [
    "Bracket", "PeriodicOptions", "PeriodicResult", "MonotoneResult",
    "bracket_bounds", "periodic_residual", "solve_periodic",
    "monotone_iteration_oracle",
]


@dataclass(frozen=True)
class Bracket:
    """Constant bounds 0 < lower <= upper enclosing the positive background.

    The bounds coincide exactly when the coefficients are constant.
    """

    lower: float
    upper: float

    def __post_init__(self):
        if not (0 < self.lower <= self.upper):
            raise ValidationError("bracket needs 0 < lower <= upper")


@dataclass(frozen=True)
class PeriodicOptions:
    residual_tol: float = 1e-10
    max_newton_iters: int = 50
    damping: float = 1.0

    def __post_init__(self):
        if not (0 < self.residual_tol and 0 < self.damping <= 1.0
                and self.max_newton_iters > 0):
            raise ValidationError("invalid periodic solver options")


@dataclass(frozen=True)
class PeriodicResult:
    """Converged background with its wrap node made explicit.

    `profile` lives on [0, T] with n_per + 1 nodes and repeats node 0 at
    the right end; `coefficient` stores the same data as one period for
    exact integer-indexed extension onto larger grids.
    """

    profile: Profile
    coefficient: Coefficient
    bracket: Bracket
    residual_sup: float
    iterations: int
    clamp_count: int


@dataclass(frozen=True)
class MonotoneResult:
    from_below: Profile
    from_above: Profile
    iterations: int
    gap_sup: float
    history: tuple = ()


def bracket_bounds(problem: Problem) -> Bracket:
    """A-priori constant bounds for the positive background."""
    if problem.is_cubic:
        lower = np.sqrt(-problem.lam / problem.g.cmax)
        upper = np.sqrt(-problem.lam / problem.g.cmin)
    else:
        g1 = problem.g1
        gap1 = problem.potential.cmin - problem.lam
        gap2 = problem.potential.cmax - problem.lam
        # rho^2 solves rho^4 + g1 rho^2 = gap at each extreme of V
        lower = np.sqrt((np.sqrt(g1 * g1 + 4.0 * gap1) - g1) / 2.0)
        upper = np.sqrt((np.sqrt(g1 * g1 + 4.0 * gap2) - g1) / 2.0)
    return Bracket(lower=float(lower), upper=float(upper))


def _coefficient_arrays(problem: Problem):
    if problem.is_cubic:
        return problem.g.samples, None
    return None, problem.potential.samples


def periodic_residual(problem: Problem, values: np.ndarray) -> np.ndarray:
    """Pointwise residual of the periodic stationary equation."""
    phi = np.asarray(values, dtype=float)
    n = problem.n_per
    if phi.shape != (n,):
        raise ValidationError(f"expected {n} periodic unknowns, got {phi.shape}")
    h = problem.period / n
    lap = (np.roll(phi, -1) - 2.0 * phi + np.roll(phi, 1)) / h**2
    g, v = _coefficient_arrays(problem)
    if problem.is_cubic:
        return -0.5 * lap + problem.lam * phi + g * phi**3
    return lap + (v - problem.lam) * phi - problem.g1 * phi**3 - phi**5


def _jacobian_parts(problem: Problem, phi: np.ndarray):
    n = phi.shape[0]
    h = problem.period / n
    g, v = _coefficient_arrays(problem)
    if problem.is_cubic:
        off = np.full(n, -0.5 / h**2)
        diag = 1.0 / h**2 + problem.lam + 3.0 * g * phi**2
    else:
        off = np.full(n, 1.0 / h**2)
        diag = (-2.0 / h**2 + (v - problem.lam)
                - 3.0 * problem.g1 * phi**2 - 5.0 * phi**4)
    return off, diag, off


def solve_periodic(problem: Problem, options: PeriodicOptions | None = None
                   ) -> PeriodicResult:
    """Damped Newton solve for the positive periodic background.

    Starts from the bracket midpoint. Iterates are clamped back into
    the bracket; needing that clamp more than once means the iteration
    is not trustworthy and raises BracketViolation.
    """
    options = options or PeriodicOptions()
    bracket = bracket_bounds(problem)
    n = problem.n_per
    phi = np.full(n, 0.5 * (bracket.lower + bracket.upper))
    res = periodic_residual(problem, phi)
    sup = float(np.max(np.abs(res)))
    clamp_count = 0
    iterations = 0
    for iterations in range(options.max_newton_iters + 1):
        if sup <= options.residual_tol:
            break
        if iterations == options.max_newton_iters:
            raise NonConvergence(
                f"periodic Newton stalled at residual {sup:.3e}",
                final_residual=sup, iterations=iterations)
        lower_d, diag, upper_d = _jacobian_parts(problem, phi)
        delta = solve_cyclic(lower_d, diag, upper_d, -res)
        t = options.damping
        accepted = False
        for _ in range(30):
            trial = phi + t * delta
            trial_res = periodic_residual(problem, trial)
            trial_sup = float(np.max(np.abs(trial_res)))
            if trial_sup < sup:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            raise NonConvergence(
                f"periodic Newton line search failed at residual {sup:.3e}",
                final_residual=sup, iterations=iterations + 1)
        clamped = np.clip(trial, bracket.lower, bracket.upper)
        if not np.array_equal(clamped, trial):
            clamp_count += 1
            if clamp_count > 1:
                raise BracketViolation(
                    "periodic iterate left the bracket more than once")
            trial = clamped
            trial_res = periodic_residual(problem, trial)
            trial_sup = float(np.max(np.abs(trial_res)))
        phi, res, sup = trial, trial_res, trial_sup
    profile, coefficient = _package_background(problem, phi)
    return PeriodicResult(profile=profile, coefficient=coefficient,
                          bracket=bracket, residual_sup=sup,
                          iterations=iterations, clamp_count=clamp_count)


def _package_background(problem: Problem, phi: np.ndarray):
    n = problem.n_per
    grid = Grid(xmin=0.0, xmax=problem.period, n=n + 1)
    wrapped = np.concatenate([phi, phi[:1]])
    profile = Profile(grid=grid, values=wrapped)
    coefficient = Coefficient(samples=phi, period=problem.period)
    return profile, coefficient


def _monotone_shift(problem: Problem, bracket: Bracket) -> float:
    """Upper bound for the derivative of the forcing over the bracket."""
    if problem.is_cubic:
        return 2.0 * problem.lam + 6.0 * problem.g.cmax * bracket.upper**2
    lo2, up2 = bracket.lower**2, bracket.upper**2
    ramp = max(3.0 * problem.g1 * lo2 + 5.0 * lo2**2,
               3.0 * problem.g1 * up2 + 5.0 * up2**2)
    return -(problem.potential.cmin - problem.lam) + ramp


def _forcing(problem: Problem, phi: np.ndarray) -> np.ndarray:
    """F with the equation written as phi'' = F(phi)."""
    g, v = _coefficient_arrays(problem)
    if problem.is_cubic:
        return 2.0 * problem.lam * phi + 2.0 * g * phi**3
    return -(v - problem.lam) * phi + problem.g1 * phi**3 + phi**5


def monotone_iteration_oracle(problem: Problem, tol: float = 1e-10,
                              max_iters: int = 200000,
                              record: bool = False) -> MonotoneResult:
    """Monotone sweeps from the constant sub- and supersolution.

    Each sweep solves (D2 - K) phi_new = F(phi) - K phi with K at least
    the bracket-wide sup of F'. The shifted operator is an M-matrix, so
    the lower sweep increases, the upper sweep decreases, and they
    enclose the background at every iteration up to rounding.
    """
    bracket = bracket_bounds(problem)
    n = problem.n_per
    h = problem.period / n
    shift = _monotone_shift(problem, bracket)
    if not shift > 0:
        raise NonConvergence(f"monotone shift {shift} is not positive")
    off = np.full(n, 1.0 / h**2)
    diag = np.full(n, -2.0 / h**2 - shift)

    below = np.full(n, bracket.lower)
    above = np.full(n, bracket.upper)
    history = []
    done_below = done_above = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        if not done_below:
            new_below = solve_cyclic(off, diag, off,
                                     _forcing(problem, below) - shift * below)
            done_below = float(np.max(np.abs(new_below - below))) < tol
            below = new_below
        if not done_above:
            new_above = solve_cyclic(off, diag, off,
                                     _forcing(problem, above) - shift * above)
            done_above = float(np.max(np.abs(new_above - above))) < tol
            above = new_above
        if record:
            history.append((below.copy(), above.copy()))
        if done_below and done_above:
            break
    else:
        raise NonConvergence("monotone iteration did not converge",
                             iterations=max_iters)
    gap = float(np.max(above - below))
    prof_below, _ = _package_background(problem, below)
    prof_above, _ = _package_background(problem, above)
    return MonotoneResult(from_below=prof_below, from_above=prof_above,
                          iterations=iterations, gap_sup=gap,
                          history=tuple(history))

"""Front (dark-soliton ratio) profiles on a truncated symmetric domain.

The ratio w is found by constrained energy descent: explicit gradient
flow with backtracking and clamping to [-1, 1], interleaved with a
damped Newton polish on the residual once the iterate is in the basin.
The flow is robust but slow near convergence; the polish is fast but
needs a good iterate, and its linearization carries a near-zero
translation eigenvalue, so it runs with an LU factorization, a step
cap, and a residual line search rather than as plain Newton.
"""

from dataclasses import dataclass

import numpy as np

from ._banded import solve_tridiagonal
from .errors import (GridMismatchError, LineSearchFailure, MonotonicityLoss,
                     NoSignChange, NonConvergence, SingularLinearization,
                     ValidationError)
from .model import Grid, Problem, Profile
from .periodic import bracket_bounds
from .reduction import WeightedAC, _energy_values, _residual_values

__all__ = [
    "DescentState", "MinimizeOptions", "MinimizeResult", "PolishResult",
    "decay_rate_bound", "select_truncation", "make_truncated_grid",
    "guess_rate", "initial_guess", "front_existence_margin", "descent_step",
    "minimize", "newton_polish", "report_crossing",
]

# Guess profiles stay strictly inside (-1, 1) except at the boundary.
_GUESS_CLEARANCE = 1e-12
# Newton corrections larger than this in sup norm are treated as
# divergence of the linearization, not as a usable step.
_POLISH_STEP_CAP = 1.0


@dataclass(frozen=True)
class MinimizeOptions:
    grad_tol: float = 1e-8
    max_outer_iters: int = 20000
    newton_polish: bool = True
    max_halvings: int = 60

    def __post_init__(self):
        if not (self.grad_tol > 0 and self.max_outer_iters > 0
                and self.max_halvings > 0):
            raise ValidationError("invalid minimizer options")


@dataclass(frozen=True)
class PolishResult:
    values: np.ndarray
    residual_sup: float
    iterations: int
    history: tuple
    singular: bool
    converged: bool


@dataclass(frozen=True)
class MinimizeResult:
    profile: Profile
    energies: tuple
    final_energy: float
    flow_iterations: int
    polish_iterations: int
    grad_sup_per_h: float
    flags: frozenset


def decay_rate_bound(problem: Problem) -> float:
    """Worst-case exponential rate of approach of w to +-1.

    Obtained by linearizing the reduced equation about w = 1 and taking
    the least favorable background value allowed by the bracket.
    """
    bracket = bracket_bounds(problem)
    if problem.is_cubic:
        return 2.0 * np.sqrt(-problem.lam * problem.g.cmin / problem.g.cmax)
    rho1sq = bracket.lower**2
    return float(np.sqrt(2.0 * problem.g1 * rho1sq + 4.0 * rho1sq**2))


def select_truncation(problem: Problem) -> float:
    """Smallest whole number of periods covering 12 / rate, at least 3 periods."""
    kappa = decay_rate_bound(problem)
    want = max(12.0 / kappa, 3.0 * problem.period)
    return float(np.ceil(want / problem.period - 1e-12) * problem.period)


def make_truncated_grid(period: float, half_length: float,
                        n_per_period: int) -> Grid:
    """Symmetric grid on [-L, L] whose nodes tile the coefficient period."""
    m = round(half_length / period)
    if m < 1 or abs(half_length - m * period) > 1e-9 * max(1.0, half_length):
        raise GridMismatchError(
            f"half length {half_length} is not a whole number of periods "
            f"{period}")
    n = 2 * m * int(n_per_period) + 1
    return Grid(xmin=-half_length, xmax=half_length, n=n)


def guess_rate(ac: WeightedAC) -> float:
    """Decay rate of the linearization about w = 1 on the actual background."""
    vals = (2.0 * ac.b + 4.0 * ac.c) / ac.a
    worst = float(np.min(vals))
    if worst <= 0:
        raise ValidationError("linearization about w = 1 is not coercive")
    return float(np.sqrt(worst))


def initial_guess(grid: Grid, kappa: float) -> Profile:
    """Monotone tanh ramp with the target asymptotic rate."""
    w = np.tanh(0.5 * kappa * grid.x())
    np.clip(w, -1.0 + _GUESS_CLEARANCE, 1.0 - _GUESS_CLEARANCE, out=w)
    w[0], w[-1] = -1.0, 1.0
    return Profile(grid, w)


def front_existence_margin(problem: Problem) -> float | None:
    """Margin of the condition keeping the reduced energy density nonnegative.

    Only the cubic-quintic model can violate it (for g1 < 0). A negative
    margin does not stop the computation; results are flagged as sitting
    outside the supported regime.
    """
    if problem.is_cubic:
        return None
    lower = bracket_bounds(problem).lower
    return float(problem.g1 / 4.0 + lower**2 / 3.0)


def newton_polish(w, ac: WeightedAC, tol: float,
                  max_iters: int = 40) -> PolishResult:
    """Damped Newton on the reduced residual with pinned boundary values.

    Never raises: a singular factorization, an oversized correction or
    a stalled line search all come back as singular=True with the work
    done so far, so callers can fall back to the flow.
    """
    w = np.array(w.values if isinstance(w, Profile) else w, dtype=float)
    n = w.shape[0]
    h = ac.h
    res = _residual_values(ac, w)
    sup = float(np.max(np.abs(res)))
    history = [sup]
    if sup <= tol:
        return PolishResult(values=w, residual_sup=sup, iterations=0,
                            history=tuple(history), singular=False,
                            converged=True)
    edge = 0.5 * (ac.a[:-1] + ac.a[1:])
    iterations = 0
    for iterations in range(1, max_iters + 1):
        wi = w[1:-1]
        ramp = ac.b[1:-1] * (3.0 * wi**2 - 1.0)
        if ac.kind != "cubic":
            ramp = ramp + ac.c[1:-1] * (5.0 * wi**4 - 1.0)
        diag = -(edge[1:] + edge[:-1]) / h**2 - ramp
        lower = np.concatenate([[0.0], edge[1:-1]]) / h**2
        upper = np.concatenate([edge[1:-1], [0.0]]) / h**2
        try:
            delta = solve_tridiagonal(lower, diag, upper, -res[1:-1])
        except SingularLinearization:
            return PolishResult(values=w, residual_sup=sup,
                                iterations=iterations - 1,
                                history=tuple(history), singular=True,
                                converged=False)
        if not np.all(np.isfinite(delta)) or \
                float(np.max(np.abs(delta))) > _POLISH_STEP_CAP:
            return PolishResult(values=w, residual_sup=sup,
                                iterations=iterations - 1,
                                history=tuple(history), singular=True,
                                converged=False)
        t = 1.0
        accepted = False
        for _ in range(30):
            trial = w.copy()
            trial[1:-1] += t * delta
            trial_res = _residual_values(ac, trial)
            trial_sup = float(np.max(np.abs(trial_res)))
            if trial_sup < sup:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            # No direction of decrease left, usually the rounding floor.
            return PolishResult(values=w, residual_sup=sup,
                                iterations=iterations - 1,
                                history=tuple(history),
                                singular=sup > tol, converged=sup <= tol)
        w, res, sup = trial, trial_res, trial_sup
        history.append(sup)
        if sup <= tol:
            return PolishResult(values=w, residual_sup=sup,
                                iterations=iterations,
                                history=tuple(history), singular=False,
                                converged=True)
    return PolishResult(values=w, residual_sup=sup, iterations=iterations,
                        history=tuple(history), singular=True,
                        converged=False)


def _line_search(ac, w, energy, grad, step, max_halvings):
    """Backtracking trial against the gradient: clamp, repin, accept on
    nonincreasing energy. Returns (trial, energy, step, halvings) with
    trial None when every halving failed; the reduced step is kept."""
    for k in range(max_halvings):
        trial = np.clip(w - step * grad, -1.0, 1.0)
        trial[0], trial[-1] = w[0], w[-1]
        trial_energy = _energy_values(ac, trial)
        if trial_energy <= energy:
            return trial, trial_energy, step, k
        step *= 0.5
    return None, energy, step, max_halvings


@dataclass(frozen=True)
class DescentState:
    """Carry-over between descent steps: step size and current energy."""

    step: float
    energy: float


def descent_step(w: Profile, ac: WeightedAC,
                 state: DescentState | None = None,
                 max_halvings: int = 60):
    """One accepted step of the clamped gradient flow.

    Returns (w', E', state') with E' <= E(w): the step moves against
    the energy gradient, clamps into [-1, 1] (clamping never raises
    the energy) and leaves the boundary nodes untouched. With no
    state the step size starts from the same stability-limit guess
    the outer minimizer uses.
    """
    if w.grid != ac.grid:
        raise GridMismatchError("profile grid differs from weights")
    vals = np.array(w.values, dtype=float)
    if state is None:
        state = DescentState(
            step=ac.h / (8.0 * ac.kinetic_factor * float(np.max(ac.a))),
            energy=_energy_values(ac, vals))
    grad = -2.0 * ac.kinetic_factor * ac.h * _residual_values(ac, vals)
    trial, trial_energy, step, k = _line_search(
        ac, vals, state.energy, grad, state.step, max_halvings)
    if trial is None:
        raise LineSearchFailure(
            f"no acceptable step after {max_halvings} halvings")
    if k == 0:
        step = min(step * 1.25, 1e6 * ac.h)
    return (Profile(ac.grid, trial), float(trial_energy),
            DescentState(step=step, energy=float(trial_energy)))


def _descent_burst(ac, w, energy, step, budget, target_res, max_halvings):
    """Run up to `budget` accepted descent steps; returns the new state.

    Each step moves against the energy gradient, clamps into [-1, 1],
    restores the pinned boundary values and accepts only if the energy
    did not increase. The step size adapts: grow on clean acceptance,
    keep the reduction after a backtrack.
    """
    energies = []
    res = _residual_values(ac, w)
    res_sup = float(np.max(np.abs(res)))
    accepted = 0
    while accepted < budget and res_sup > target_res:
        grad = -2.0 * ac.kinetic_factor * ac.h * res
        trial, trial_energy, step, k = _line_search(
            ac, w, energy, grad, step, max_halvings)
        if trial is None:
            raise LineSearchFailure(
                f"descent stalled at gradient sup {2.0 * ac.kinetic_factor * res_sup:.3e}")
        w, energy = trial, trial_energy
        energies.append(energy)
        accepted += 1
        if k == 0:
            step = min(step * 1.25, 1e6 * ac.h)
        res = _residual_values(ac, w)
        res_sup = float(np.max(np.abs(res)))
    return w, energy, step, energies, accepted, res_sup


def minimize(ac: WeightedAC, options: MinimizeOptions | None = None,
             w0: Profile | None = None) -> MinimizeResult:
    """Constrained descent to the front profile of the reduced energy.

    Convergence test: sup |gradient| / h <= grad_tol, equivalently
    sup |residual| <= grad_tol / (2 * kinetic_factor). The energy log
    records the initial value and every accepted flow step and never
    increases. A converged profile that fails to be monotone raises
    MonotonicityLoss rather than being returned.
    """
    options = options or MinimizeOptions()
    if w0 is None:
        w0 = initial_guess(ac.grid, guess_rate(ac))
    elif w0.grid != ac.grid:
        raise GridMismatchError("starting profile grid differs from weights")
    w = np.array(w0.values, dtype=float)
    if not (w[0] == -1.0 and w[-1] == 1.0):
        raise ValidationError("front needs boundary values -1 and +1")

    target_res = options.grad_tol / (2.0 * ac.kinetic_factor)
    step = ac.h / (8.0 * ac.kinetic_factor * float(np.max(ac.a)))
    energy = _energy_values(ac, w)
    energies = [energy]
    flags = set()
    flow_iterations = 0
    polish_iterations = 0
    burst = 100

    res_sup = float(np.max(np.abs(_residual_values(ac, w))))
    while res_sup > target_res:
        if flow_iterations >= options.max_outer_iters:
            raise NonConvergence(
                f"descent budget exhausted at gradient sup per h "
                f"{2.0 * ac.kinetic_factor * res_sup:.3e}",
                final_residual=res_sup, iterations=flow_iterations)
        budget = min(burst, options.max_outer_iters - flow_iterations)
        w, energy, step, new_energies, accepted, res_sup = _descent_burst(
            ac, w, energy, step, budget, target_res, options.max_halvings)
        energies.extend(new_energies)
        flow_iterations += accepted
        burst = min(burst * 2, 2000)
        if res_sup <= target_res:
            break
        if options.newton_polish:
            polish = newton_polish(w, ac, tol=target_res)
            polish_iterations += polish.iterations
            if polish.converged:
                w = polish.values
                res_sup = polish.residual_sup
                break
            if polish.singular:
                flags.add("polish_deferred")
            # Keep partial polish progress only if it also kept the
            # energy from rising; the log must stay nonincreasing.
            if polish.residual_sup < res_sup:
                new_energy = _energy_values(ac, polish.values)
                if new_energy <= energy:
                    w = polish.values
                    res_sup = polish.residual_sup
                    energy = new_energy

    if np.any(np.diff(w) < 0):
        raise MonotonicityLoss("converged front is not monotone")
    if float(np.max(np.abs(w[1:-1]))) >= 1.0:
        flags.add("amplitude_saturated")
    grad_sup = 2.0 * ac.kinetic_factor * ac.h * res_sup
    return MinimizeResult(profile=Profile(ac.grid, w),
                          energies=tuple(energies),
                          final_energy=_energy_values(ac, w),
                          flow_iterations=flow_iterations,
                          polish_iterations=polish_iterations,
                          grad_sup_per_h=grad_sup / ac.h,
                          flags=frozenset(flags))


def report_crossing(w: Profile) -> float:
    """Linear-interpolated position of the sign change of w.

    For a monotone front this is the front location. Raises
    NoSignChange when the profile has one sign everywhere.
    """
    v = w.values
    x = w.grid.x()
    zeros = np.flatnonzero(v == 0.0)
    if zeros.size:
        return float(x[zeros[0]])
    sign_flip = np.flatnonzero(v[:-1] * v[1:] < 0.0)
    if not sign_flip.size:
        raise NoSignChange("profile has no sign change")
    i = int(sign_flip[0])
    return float(x[i] - v[i] * (x[i + 1] - x[i]) / (v[i + 1] - v[i]))

"""End-to-end drivers tying the stages together.

A soliton run is: validate the problem, solve the periodic background
(Newton), cross-check it against the monotone iteration, extend it to
a truncated symmetric domain, reduce, minimize the reduced energy, and
assemble the verification report. Everything the command line writes
comes out of the run object built here.
"""

from dataclasses import dataclass

import numpy as np

from .kink import (MinimizeOptions, MinimizeResult, front_existence_margin,
                   make_truncated_grid, minimize, report_crossing,
                   select_truncation)
from .model import Grid, Problem, Profile, validate_problem
from .periodic import (MonotoneResult, PeriodicOptions, PeriodicResult,
                       monotone_iteration_oracle, solve_periodic)
from .reduction import lift, potential_floor, to_allen_cahn
from .verify import SolitonReport, build_report

__all__ = ["SolitonRun", "run_background", "run_soliton"]


@dataclass(frozen=True, eq=False)
class SolitonRun:
    problem: Problem
    periodic: PeriodicResult
    monotone: MonotoneResult
    monotone_agreement_sup: float
    half_length: float
    grid: Grid
    background_ext: Profile
    minimize: MinimizeResult
    w: Profile
    phi: Profile
    crossing: float
    report: SolitonReport
    existence_margin: float | None
    run_flags: frozenset
    status: str
    tail_fraction: float


def run_background(problem: Problem,
                   periodic_options: PeriodicOptions | None = None,
                   oracle_tol: float = 1e-10):
    """Solve the periodic background twice and measure the disagreement."""
    problem = validate_problem(problem)
    periodic = solve_periodic(problem, periodic_options)
    monotone = monotone_iteration_oracle(problem, tol=oracle_tol)
    agreement = float(np.max(np.abs(
        periodic.profile.values - monotone.from_below.values)))
    return problem, periodic, monotone, agreement


def run_soliton(problem: Problem,
                half_length: float | None = None,
                periodic_options: PeriodicOptions | None = None,
                minimize_options: MinimizeOptions | None = None,
                tail_fraction: float = 0.25) -> SolitonRun:
    """Full pipeline from problem data to a verified front profile."""
    problem, periodic, monotone, agreement = run_background(
        problem, periodic_options)

    if half_length is None:
        half_length = select_truncation(problem)
    grid = make_truncated_grid(problem.period, half_length, problem.n_per)
    background_ext = Profile(grid, periodic.coefficient.on_grid(grid))
    ac = to_allen_cahn(problem, background_ext)

    flags = set()
    if problem.diagnostics is not None and not problem.diagnostics.holds:
        flags.add("uniqueness_unverified")
    margin = front_existence_margin(problem)
    if margin is not None and margin < 0:
        flags.add("outside_variational_regime")

    result = minimize(ac, minimize_options)
    w = result.profile
    if potential_floor(ac, w) < 0:
        flags.add("energy_density_negative")
    phi = lift(w, background_ext)
    crossing = report_crossing(w)
    # The report carries only what is recomputable from the written
    # profiles; solver-side flags stay on the run object.
    report = build_report(problem, w, background_ext,
                          tail_fraction=tail_fraction)

    if "outside_variational_regime" in flags:
        status = "unsupported_regime"
    elif report.verified:
        status = "ok"
    else:
        status = "property_violation"
    return SolitonRun(problem=problem, periodic=periodic, monotone=monotone,
                      monotone_agreement_sup=agreement,
                      half_length=float(half_length), grid=grid,
                      background_ext=background_ext, minimize=result,
                      w=w, phi=phi, crossing=crossing, report=report,
                      existence_margin=margin,
                      run_flags=frozenset(flags | set(result.flags)),
                      status=status, tail_fraction=tail_fraction)

"""Dark-soliton profiles of the defocusing NLS with periodic coefficients.

The public surface re-exports the problem data types, the periodic
background solvers, the reduced-energy minimizer, the verification
report and the time evolution driver. The command line lives in
darksol.cli.
"""

from .errors import (BracketViolation, ConfigError, DarksolError,
                     ExpressionError, GridMismatchError, LineSearchFailure,
                     MonotonicityLoss, NonConvergence, NoSignChange,
                     PhaseUndefined, SingularLinearization, StepDivergence,
                     TailUnderflow, ValidationError)
from .evolve import (ComplexField, EvolveOptions, PhaseCheck, Trajectory,
                     evolve_nls, kink_drift, make_ansatz, modulus_deviation,
                     phase_rotation_check)
from .exprparse import CompiledExpression, compile_expression
from .kink import (DescentState, MinimizeOptions, MinimizeResult,
                   PolishResult, decay_rate_bound, descent_step,
                   front_existence_margin, guess_rate, initial_guess,
                   make_truncated_grid, minimize, newton_polish,
                   report_crossing, select_truncation)
from .model import (Coefficient, Grid, Problem, Profile,
                    UniquenessDiagnostic, make_uniform_grid,
                    sample_coefficient, uniqueness_diagnostic,
                    validate_problem)
from .periodic import (Bracket, MonotoneResult, PeriodicOptions,
                       PeriodicResult, bracket_bounds,
                       monotone_iteration_oracle, periodic_residual,
                       solve_periodic)
from .pipeline import SolitonRun, run_background, run_soliton
from .reduction import (WeightedAC, divide_by_background, energy,
                        energy_gradient, lift, potential_floor,
                        residual_reduced, to_allen_cahn)
from .verify import (DecayFit, SolitonReport, amplitude_margin,
                     build_report, check_asymptotic_ratio, fit_decay_rate,
                     gradient_consistency, monotonicity_margin, residual_phi)

__version__ = "0.1.0"

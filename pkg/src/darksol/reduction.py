"""Reduction of the stationary problem onto the background.

Dividing the profile by the positive periodic background turns the
stationary equation into a weighted Allen-Cahn equation for the ratio
w, with weights built from powers of the background. The discrete
energy below is chosen so that its gradient is exactly -2 * kf * h
times the discrete residual of that equation (midpoint-averaged edge
weights, trapezoid quadrature), which is what makes descent on the
energy and Newton on the residual interchangeable.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, ValidationError
from .model import Grid, Problem, Profile

__all__ = [
    "WeightedAC", "to_allen_cahn", "energy", "energy_gradient",
    "residual_reduced", "lift", "divide_by_background", "potential_floor",
]


@dataclass(frozen=True, eq=False)
class WeightedAC:
    """Weighted Allen-Cahn data (a w')' = b w (w^2 - 1) + c w (w^4 - 1).

    a is the squared background; b and c collect the interaction terms.
    kinetic_factor is the prefactor of the gradient term in the energy,
    fixed by the convention in which each model is written.
    """

    grid: Grid
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    kind: str
    kinetic_factor: float
    g1: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c"):
            arr = np.array(getattr(self, name), dtype=float, copy=True)
            if arr.shape != (self.grid.n,):
                raise ValidationError(f"weight {name} does not match the grid")
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"weight {name} has non-finite entries")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if np.min(self.a) <= 0:
            raise ValidationError("weight a must be strictly positive")
        if self.kind == "cubic" and np.any(self.c != 0.0):
            raise ValidationError("cubic reduction has no quintic weight")
        if self.kinetic_factor <= 0:
            raise ValidationError("kinetic factor must be positive")

    @property
    def h(self) -> float:
        return self.grid.h


def to_allen_cahn(problem: Problem, background: Profile) -> WeightedAC:
    """Build the weighted Allen-Cahn data from a positive background.

    The background may live on the period cell or on any larger grid
    aligned with the coefficient nodes.
    """
    phi = background.values
    if np.min(phi) <= 0:
        raise ValidationError("background must be strictly positive")
    grid = background.grid
    if problem.is_cubic:
        g = problem.g.on_grid(grid)
        a = phi**2
        b = 2.0 * g * phi**4
        c = np.zeros_like(phi)
        kf = 1.0
    else:
        # Potential enters only through the background; the reduced
        # weights need just powers of phi and the constant g1.
        problem.potential.on_grid(grid)  # alignment check
        a = phi**2
        b = problem.g1 * phi**4
        c = phi**6
        kf = 0.5
    return WeightedAC(grid=grid, a=a, b=b, c=c, kind=problem.kind,
                      kinetic_factor=kf, g1=problem.g1)


def _check_profile(w: Profile, ac: WeightedAC) -> np.ndarray:
    if w.grid != ac.grid:
        raise GridMismatchError("profile grid differs from the reduction grid")
    return w.values


def _edge_weights(ac: WeightedAC) -> np.ndarray:
    return 0.5 * (ac.a[:-1] + ac.a[1:])


def _potential_density(ac: WeightedAC, w: np.ndarray) -> np.ndarray:
    q = 1.0 - w**2
    if ac.kind == "cubic":
        return 0.5 * ac.b * q**2
    return 0.25 * ac.b * q**2 + (ac.c / 6.0) * (2.0 + w**2) * q**2


def _nonlinearity(ac: WeightedAC, w: np.ndarray) -> np.ndarray:
    out = ac.b * w * (w**2 - 1.0)
    if ac.kind != "cubic":
        out = out + ac.c * w * (w**4 - 1.0)
    return out


def _energy_values(ac: WeightedAC, w: np.ndarray) -> float:
    h = ac.h
    kinetic = ac.kinetic_factor * np.sum(_edge_weights(ac) * np.diff(w)**2) / h
    density = _potential_density(ac, w)
    weights = np.ones_like(w)
    weights[0] = weights[-1] = 0.5
    return float(kinetic + h * np.sum(weights * density))


def _residual_values(ac: WeightedAC, w: np.ndarray) -> np.ndarray:
    edge = _edge_weights(ac)
    flux = edge * np.diff(w)
    out = np.zeros_like(w)
    out[1:-1] = (flux[1:] - flux[:-1]) / ac.h**2 - _nonlinearity(ac, w)[1:-1]
    return out


def _gradient_values(ac: WeightedAC, w: np.ndarray) -> np.ndarray:
    # Exact identity: gradient = -2 * kf * h * residual at interior nodes.
    return -2.0 * ac.kinetic_factor * ac.h * _residual_values(ac, w)


def energy(w: Profile, ac: WeightedAC) -> float:
    """Discrete energy of a ratio profile w."""
    return _energy_values(ac, _check_profile(w, ac))


def energy_gradient(w: Profile, ac: WeightedAC) -> Profile:
    """Gradient of the discrete energy; zero at the pinned boundary nodes."""
    return Profile(ac.grid, _gradient_values(ac, _check_profile(w, ac)))


def residual_reduced(w: Profile, ac: WeightedAC) -> Profile:
    """Residual of the reduced equation; zero at the pinned boundary nodes."""
    return Profile(ac.grid, _residual_values(ac, _check_profile(w, ac)))


def lift(w: Profile, background_ext: Profile) -> Profile:
    """Multiply the ratio by the extended background to recover the profile."""
    if w.grid != background_ext.grid:
        raise GridMismatchError("ratio and background live on different grids")
    return Profile(w.grid, background_ext.values * w.values)


def divide_by_background(phi: Profile, background_ext: Profile) -> Profile:
    """Inverse of lift; the background must be strictly positive."""
    if phi.grid != background_ext.grid:
        raise GridMismatchError("profile and background live on different grids")
    if np.min(background_ext.values) <= 0:
        raise ValidationError("background must be strictly positive")
    return Profile(phi.grid, phi.values / background_ext.values)


def potential_floor(ac: WeightedAC, w: Profile) -> float:
    """Pointwise minimum of the double-well prefactor b/4 + c (2 + w^2) / 6.

    Nonnegative everywhere means the energy density cannot dip below
    zero, which is the regime where the variational argument applies.
    For the cubic reduction this is b/4 > 0 automatically.
    """
    vals = _check_profile(w, ac)
    if ac.kind == "cubic":
        return float(np.min(ac.b) / 4.0)
    return float(np.min(ac.b / 4.0 + ac.c * (2.0 + vals**2) / 6.0))

import numpy as np
import pytest

from darksol import (Profile, WeightedAC, divide_by_background, energy,
                     energy_gradient, lift, make_uniform_grid,
                     potential_floor, residual_reduced, solve_periodic,
                     to_allen_cahn)
from darksol.errors import GridMismatchError, ValidationError

from conftest import (constant_cubic, constant_quintic, sinusoidal_cubic,
                      sinusoidal_quintic)


def background_on(problem, xmin, xmax):
    res = solve_periodic(problem)
    n_per = problem.n_per
    grid = make_uniform_grid(xmin, xmax, int(round((xmax - xmin) * n_per)) + 1)
    return grid, Profile(grid, res.coefficient.on_grid(grid))


def hand_gradient(ac, w):
    """Independent per-node energy partials, written as explicit loops."""
    h = ac.h
    kf = ac.kinetic_factor
    n = w.shape[0]
    out = np.zeros(n)
    for i in range(1, n - 1):
        a_minus = 0.5 * (ac.a[i - 1] + ac.a[i])
        a_plus = 0.5 * (ac.a[i] + ac.a[i + 1])
        kin = (2.0 * kf / h) * (a_minus * (w[i] - w[i - 1])
                                - a_plus * (w[i + 1] - w[i]))
        pot = ac.b[i] * w[i] * (w[i] ** 2 - 1.0)
        if ac.kind != "cubic":
            pot += ac.c[i] * w[i] * (w[i] ** 4 - 1.0)
        out[i] = kin + 2.0 * kf * h * pot
    return out


def test_constant_cubic_weights():
    grid, bg = background_on(constant_cubic(lam=-1.0), -2.0, 2.0)
    ac = to_allen_cahn(constant_cubic(lam=-1.0), bg)
    np.testing.assert_array_equal(ac.a, np.ones(grid.n))
    np.testing.assert_array_equal(ac.b, 2.0 * np.ones(grid.n))
    np.testing.assert_array_equal(ac.c, np.zeros(grid.n))
    assert ac.kinetic_factor == 1.0


def test_constant_quintic_weights():
    problem = constant_quintic(lam=-1.0, g1=0.0)
    grid, bg = background_on(problem, -2.0, 2.0)
    ac = to_allen_cahn(problem, bg)
    np.testing.assert_allclose(ac.a, 1.0, atol=5e-15)
    np.testing.assert_allclose(ac.b, 0.0, atol=5e-15)
    np.testing.assert_allclose(ac.c, 1.0, atol=5e-15)
    assert ac.kinetic_factor == 0.5


def test_gradient_is_scaled_residual_cubic(rng):
    problem = sinusoidal_cubic(lam=-1.0, amp=0.5, n_per=64)
    grid, bg = background_on(problem, -2.0, 2.0)
    ac = to_allen_cahn(problem, bg)
    w = Profile(grid, rng.uniform(-1.2, 1.2, grid.n))
    grad = energy_gradient(w, ac).values
    res = residual_reduced(w, ac).values
    np.testing.assert_array_equal(grad, -2.0 * ac.kinetic_factor * grid.h * res)
    # independent hand-rolled partial derivatives of the energy
    np.testing.assert_allclose(grad, hand_gradient(ac, w.values),
                               rtol=1e-10, atol=1e-12)


def test_gradient_is_scaled_residual_quintic(rng):
    problem = sinusoidal_quintic(lam=-1.0, amp=0.3, g1=0.5, n_per=64)
    grid, bg = background_on(problem, -2.0, 2.0)
    ac = to_allen_cahn(problem, bg)
    w = Profile(grid, rng.uniform(-1.2, 1.2, grid.n))
    grad = energy_gradient(w, ac).values
    np.testing.assert_allclose(grad, hand_gradient(ac, w.values),
                               rtol=1e-10, atol=1e-12)


def test_gradient_matches_finite_differences(rng):
    problem = sinusoidal_cubic(lam=-1.0, amp=0.5, n_per=32)
    grid, bg = background_on(problem, -1.0, 1.0)
    ac = to_allen_cahn(problem, bg)
    w = rng.uniform(-1.0, 1.0, grid.n)
    grad = energy_gradient(Profile(grid, w), ac).values
    delta = 1e-6
    for i in (1, grid.n // 2, grid.n - 2):
        bumped = w.copy()
        bumped[i] += delta
        e_plus = energy(Profile(grid, bumped), ac)
        bumped[i] -= 2 * delta
        e_minus = energy(Profile(grid, bumped), ac)
        fd = (e_plus - e_minus) / (2 * delta)
        assert grad[i] == pytest.approx(fd, rel=2e-5, abs=1e-9)


def test_energy_of_exact_front():
    # a = 1, b = 2: continuum energy of tanh is 8/3
    n = 4001
    grid = make_uniform_grid(-20.0, 20.0, n)
    ac = WeightedAC(grid=grid, a=np.ones(n), b=2.0 * np.ones(n),
                    c=np.zeros(n), kind="cubic", kinetic_factor=1.0)
    e = energy(Profile(grid, np.tanh(grid.x())), ac)
    assert e == pytest.approx(8.0 / 3.0, abs=1e-4)


def test_trivial_profiles():
    n = 101
    grid = make_uniform_grid(-2.0, 2.0, n)
    ac = WeightedAC(grid=grid, a=np.ones(n), b=2.0 * np.ones(n),
                    c=np.zeros(n), kind="cubic", kinetic_factor=1.0)
    ones = Profile(grid, np.ones(n))
    assert energy(ones, ac) == 0.0
    np.testing.assert_array_equal(residual_reduced(ones, ac).values,
                                  np.zeros(n))
    zeros = Profile(grid, np.zeros(n))
    np.testing.assert_array_equal(residual_reduced(zeros, ac).values,
                                  np.zeros(n))
    assert energy(zeros, ac) > 0


def test_residual_zero_at_boundary(rng):
    problem = sinusoidal_cubic(lam=-1.0, amp=0.5, n_per=32)
    grid, bg = background_on(problem, -1.0, 1.0)
    ac = to_allen_cahn(problem, bg)
    res = residual_reduced(Profile(grid, rng.uniform(-1, 1, grid.n)), ac)
    assert res.values[0] == 0.0 and res.values[-1] == 0.0


def test_lift_and_divide_round_trip(rng):
    problem = sinusoidal_cubic(lam=-1.0, amp=0.5, n_per=64)
    grid, bg = background_on(problem, -3.0, 3.0)
    w = Profile(grid, np.tanh(grid.x()) + 0.01 * rng.standard_normal(grid.n))
    phi = lift(w, bg)
    np.testing.assert_array_equal(phi.values, bg.values * w.values)
    back = divide_by_background(phi, bg)
    np.testing.assert_allclose(back.values, w.values, rtol=1e-15, atol=1e-16)


def test_grid_mismatch_is_rejected():
    problem = sinusoidal_cubic(lam=-1.0, amp=0.5, n_per=64)
    grid, bg = background_on(problem, -2.0, 2.0)
    ac = to_allen_cahn(problem, bg)
    other = make_uniform_grid(-2.0, 2.0, 33)
    w = Profile(other, np.zeros(33))
    with pytest.raises(GridMismatchError):
        energy(w, ac)
    with pytest.raises(GridMismatchError):
        lift(w, bg)


def test_weighted_ac_validation():
    n = 11
    grid = make_uniform_grid(0.0, 1.0, n)
    with pytest.raises(ValidationError):
        WeightedAC(grid=grid, a=np.zeros(n), b=np.ones(n), c=np.zeros(n),
                   kind="cubic", kinetic_factor=1.0)
    with pytest.raises(ValidationError):
        WeightedAC(grid=grid, a=np.ones(n), b=np.ones(n), c=np.ones(n),
                   kind="cubic", kinetic_factor=1.0)
    with pytest.raises(ValidationError):
        WeightedAC(grid=grid, a=np.ones(n), b=np.ones(n), c=np.zeros(n),
                   kind="cubic", kinetic_factor=0.0)


def test_to_allen_cahn_needs_positive_background():
    problem = constant_cubic(lam=-1.0, n_per=64)
    grid = make_uniform_grid(0.0, 1.0, 65)
    bad = Profile(grid, np.linspace(-0.1, 1.0, 65))
    with pytest.raises(ValidationError):
        to_allen_cahn(problem, bad)


def test_potential_floor():
    n = 65
    grid = make_uniform_grid(-1.0, 1.0, n)
    w = Profile(grid, np.zeros(n))
    cubic = WeightedAC(grid=grid, a=np.ones(n), b=2.0 * np.ones(n),
                       c=np.zeros(n), kind="cubic", kinetic_factor=1.0)
    assert potential_floor(cubic, w) == 0.5
    # strongly attractive cubic term drives the density negative
    deep = WeightedAC(grid=grid, a=np.ones(n), b=-4.0 * np.ones(n),
                      c=np.ones(n), kind="cubic-quintic", kinetic_factor=0.5)
    assert potential_floor(deep, w) == pytest.approx(-1.0 + 2.0 / 6.0,
                                                     rel=1e-14)
    safe = WeightedAC(grid=grid, a=np.ones(n), b=np.zeros(n),
                      c=np.ones(n), kind="cubic-quintic", kinetic_factor=0.5)
    assert potential_floor(safe, w) == pytest.approx(1.0 / 3.0, rel=1e-14)

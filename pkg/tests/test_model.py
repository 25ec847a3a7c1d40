import numpy as np
import pytest

from darksol import (Grid, Problem, Profile, make_uniform_grid,
                     sample_coefficient, uniqueness_diagnostic,
                     validate_problem)
from darksol.errors import GridMismatchError, ValidationError

from conftest import constant_cubic, sinusoidal_cubic, sinusoidal_quintic


def test_grid_basics():
    grid = make_uniform_grid(-6.0, 6.0, 12 * 256 + 1)
    assert grid.h == pytest.approx(1.0 / 256.0, rel=1e-15)
    x = grid.x()
    assert x[0] == -6.0 and x[-1] == 6.0
    assert x.shape == (grid.n,)


def test_grid_rejects_bad_arguments():
    with pytest.raises(ValidationError):
        Grid(0.0, 1.0, 2)
    with pytest.raises(ValidationError):
        Grid(1.0, 1.0, 11)
    with pytest.raises(ValidationError):
        Grid(0.0, np.inf, 11)
    with pytest.raises(ValidationError):
        Grid(0.0, 1.0, 10.5)


def test_profile_is_immutable_and_validated():
    grid = make_uniform_grid(0.0, 1.0, 5)
    p = Profile(grid, np.arange(5.0))
    with pytest.raises(ValueError):
        p.values[0] = 3.0
    with pytest.raises(ValidationError):
        Profile(grid, np.arange(4.0))
    with pytest.raises(ValidationError):
        Profile(grid, [0.0, 1.0, np.nan, 3.0, 4.0])
    q = p.with_values(p.values * 2)
    np.testing.assert_array_equal(q.values, 2 * p.values)


def test_sample_coefficient_sources_agree():
    n_per = 64
    from_expr = sample_coefficient("1 + 0.5*sin(2*pi*x)", 1.0, n_per)
    from_call = sample_coefficient(
        lambda x: 1 + 0.5 * np.sin(2 * np.pi * x), 1.0, n_per)
    from_table = sample_coefficient(from_expr.samples.copy(), 1.0, n_per)
    np.testing.assert_array_equal(from_expr.samples, from_call.samples)
    np.testing.assert_array_equal(from_expr.samples, from_table.samples)
    assert from_expr.n_per == n_per
    assert from_expr.h == pytest.approx(1.0 / 64.0, rel=1e-15)


def test_sample_coefficient_extra_variables():
    c = sample_coefficient("1 + a*sin(2*pi*x)", 1.0, 64,
                           variables={"a": 0.25})
    ref = sample_coefficient("1 + 0.25*sin(2*pi*x)", 1.0, 64)
    np.testing.assert_allclose(c.samples, ref.samples, rtol=1e-15)


def test_sample_coefficient_rejections():
    with pytest.raises(ValidationError):
        sample_coefficient(np.ones(7), 1.0, 8)
    with pytest.raises(ValidationError):
        sample_coefficient("1", 1.0, 2)
    with pytest.raises(ValidationError):
        sample_coefficient("1", -1.0, 8)
    with pytest.raises(ValidationError) as err:
        sample_coefficient("sin(2*pi*x)", 1.0, 64, positive=True)
    assert err.value.reason == "coefficient_not_positive"


def test_coefficient_extrema_hit_sampled_nodes():
    c = sample_coefficient("1 + 0.5*sin(2*pi*x)", 1.0, 256)
    # n_per divisible by 4, so the extrema of sin sit exactly on nodes
    assert c.cmin == 0.5
    assert c.cmax == 1.5


def test_value_at_wraps_periodically():
    c = sample_coefficient("1 + 0.5*sin(2*pi*x)", 1.0, 64)
    h = c.h
    assert c.value_at(5 * h) == c.samples[5]
    assert c.value_at(1.0 + 5 * h) == c.samples[5]
    assert c.value_at(-h) == c.samples[-1]
    with pytest.raises(GridMismatchError):
        c.value_at(0.4 * h)


def test_on_grid_is_exactly_periodic():
    c = sample_coefficient("1 + 0.5*sin(2*pi*x)", 1.0, 64)
    grid = make_uniform_grid(-3.0, 3.0, 6 * 64 + 1)
    ext = c.on_grid(grid)
    assert ext.shape == (grid.n,)
    # exact integer index map: repeats are bitwise equal
    np.testing.assert_array_equal(ext[:-1].reshape(6, 64),
                                  np.tile(ext[:64], (6, 1)))
    assert ext[-1] == ext[0]
    assert not ext.flags.writeable


def test_on_grid_rejects_misalignment():
    c = sample_coefficient("1 + 0.5*sin(2*pi*x)", 1.0, 64)
    with pytest.raises(GridMismatchError):
        c.on_grid(make_uniform_grid(0.0, 1.0, 101))
    # right spacing, origin off the sample lattice
    h = c.h
    with pytest.raises(GridMismatchError):
        c.on_grid(make_uniform_grid(0.37 * h, 0.37 * h + 1.0, 65))


def test_shifted_translates_samples():
    c = sample_coefficient("1 + 0.5*sin(2*pi*x)", 1.0, 64)
    s = c.shifted(5)
    h = c.h
    for k in (0, 3, 17):
        assert s.value_at(k * h) == c.value_at((k - 5) * h)
    np.testing.assert_array_equal(c.shifted(64).samples, c.samples)


def test_problem_rejects_inconsistent_data():
    with pytest.raises(ValidationError):
        Problem(kind="septic", lam=-1.0, period=1.0)
    g = sample_coefficient("1", 2.0, 64)
    with pytest.raises(ValidationError):
        Problem(kind="cubic", lam=-1.0, period=1.0, g=g)


def test_uniqueness_margin_examples():
    diag = uniqueness_diagnostic(constant_cubic())
    assert diag.margin == pytest.approx(2.0 / 3.0, rel=1e-14)
    assert diag.holds
    # amp 0.5 puts g_min exactly at g_max / 3
    diag = uniqueness_diagnostic(sinusoidal_cubic(amp=0.5))
    assert diag.margin == pytest.approx(0.0, abs=1e-14)
    assert not diag.holds
    diag = uniqueness_diagnostic(sinusoidal_cubic(amp=0.9))
    assert diag.margin == pytest.approx(0.1 - 1.9 / 3.0, rel=1e-12)
    assert not diag.holds


def test_validate_problem_lambda_sign():
    with pytest.raises(ValidationError) as err:
        validate_problem(constant_cubic(lam=1.0))
    assert err.value.reason == "lambda_sign"
    assert "lambda must be negative" in str(err.value)
    with pytest.raises(ValidationError):
        validate_problem(constant_cubic(lam=0.0))


def test_validate_problem_quintic_lambda_below_potential():
    # V = 0.3 cos(2 pi x) has min -0.3; lambda must sit strictly below
    with pytest.raises(ValidationError) as err:
        validate_problem(sinusoidal_quintic(lam=-0.3))
    assert err.value.reason == "lambda_sign"
    ok = validate_problem(sinusoidal_quintic(lam=-0.31))
    assert ok.lam == -0.31


def test_validate_problem_missing_coefficient():
    bad = Problem(kind="cubic", lam=-1.0, period=1.0)
    with pytest.raises(ValidationError) as err:
        validate_problem(bad)
    assert err.value.reason == "missing_coefficient"


def test_validate_problem_grid_commensurability():
    problem = constant_cubic(n_per=64)
    good = make_uniform_grid(-3.0, 3.0, 6 * 64 + 1)
    validate_problem(problem, grid=good)
    # span 6.5 periods is not an integer tiling even with aligned spacing
    bad = make_uniform_grid(0.0, 6.5, int(6.5 * 64) + 1)
    with pytest.raises(GridMismatchError):
        validate_problem(problem, grid=bad)
    with pytest.raises(GridMismatchError):
        validate_problem(problem, grid=make_uniform_grid(0.0, 1.0, 100))


def test_validate_problem_attaches_diagnostic_and_is_idempotent():
    problem = sinusoidal_cubic(amp=0.9)
    assert problem.diagnostics is None
    once = validate_problem(problem)
    assert once.diagnostics is not None
    assert not once.diagnostics.holds
    twice = validate_problem(once)
    assert twice is once

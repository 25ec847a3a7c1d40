import numpy as np
import pytest

from darksol._banded import solve_cyclic, solve_tridiagonal
from darksol.errors import SingularLinearization


def dense_tridiagonal(lower, diag, upper, cyclic=False):
    n = len(diag)
    a = np.diag(diag).astype(complex if np.iscomplexobj(diag) else float)
    a = a + np.diag(upper[:-1], 1) + np.diag(lower[1:], -1)
    if cyclic:
        a[0, -1] = lower[0]
        a[-1, 0] = upper[-1]
    return a


def test_tridiagonal_matches_dense(rng):
    n = 40
    lower = rng.standard_normal(n)
    upper = rng.standard_normal(n)
    diag = 4.0 + rng.standard_normal(n)
    rhs = rng.standard_normal(n)
    y = solve_tridiagonal(lower, diag, upper, rhs)
    want = np.linalg.solve(dense_tridiagonal(lower, diag, upper), rhs)
    np.testing.assert_allclose(y, want, rtol=1e-12, atol=1e-13)


def test_tridiagonal_complex(rng):
    n = 25
    lower = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    upper = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    diag = 5.0 + rng.standard_normal(n) + 1j * rng.standard_normal(n)
    rhs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    y = solve_tridiagonal(lower, diag, upper, rhs)
    want = np.linalg.solve(dense_tridiagonal(lower, diag, upper), rhs)
    np.testing.assert_allclose(y, want, rtol=1e-12, atol=1e-13)


def test_cyclic_matches_dense(rng):
    n = 40
    lower = rng.standard_normal(n)
    upper = rng.standard_normal(n)
    diag = 5.0 + rng.standard_normal(n)
    rhs = rng.standard_normal(n)
    y = solve_cyclic(lower, diag, upper, rhs)
    want = np.linalg.solve(dense_tridiagonal(lower, diag, upper, cyclic=True),
                           rhs)
    np.testing.assert_allclose(y, want, rtol=1e-11, atol=1e-12)


def test_cyclic_laplacian_style_system():
    # discrete periodic -y'' + y = f, the shape the periodic solver produces
    n = 128
    h = 1.0 / n
    lower = np.full(n, -1.0 / h**2)
    upper = np.full(n, -1.0 / h**2)
    diag = np.full(n, 2.0 / h**2 + 1.0)
    x = np.arange(n) * h
    f = np.sin(2 * np.pi * x)
    y = solve_cyclic(lower, diag, upper, f)
    want = np.linalg.solve(dense_tridiagonal(lower, diag, upper, cyclic=True),
                           f)
    np.testing.assert_allclose(y, want, rtol=1e-11, atol=1e-14)
    # periodic residual check, independent of any dense factorization
    res = (-np.roll(y, 1) - np.roll(y, -1) + 2 * y) / h**2 + y - f
    assert np.max(np.abs(res)) < 1e-9


def test_cyclic_falls_back_without_wrap_entries(rng):
    n = 12
    lower = rng.standard_normal(n)
    upper = rng.standard_normal(n)
    lower[0] = 0.0
    upper[-1] = 0.0
    diag = 4.0 + rng.standard_normal(n)
    rhs = rng.standard_normal(n)
    y = solve_cyclic(lower, diag, upper, rhs)
    want = np.linalg.solve(dense_tridiagonal(lower, diag, upper), rhs)
    np.testing.assert_allclose(y, want, rtol=1e-12, atol=1e-13)


def test_singular_matrix_is_reported():
    n = 6
    zeros = np.zeros(n)
    with pytest.raises(SingularLinearization):
        solve_tridiagonal(zeros, zeros, zeros, np.ones(n))


def test_cyclic_needs_three_unknowns():
    with pytest.raises(ValueError):
        solve_cyclic(np.ones(2), np.ones(2), np.ones(2), np.ones(2))

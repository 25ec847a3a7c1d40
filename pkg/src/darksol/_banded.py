"""Tridiagonal and cyclic-tridiagonal linear solves.

Thin wrappers over scipy's banded LU. The cyclic variant handles the
periodic discretizations via a rank-one (Sherman-Morrison) update of
the open-chain system, so nothing here is ever densified.
"""

import numpy as np
from scipy.linalg import solve_banded

from .errors import SingularLinearization

__all__ = ["solve_tridiagonal", "solve_cyclic"]


def solve_tridiagonal(lower, diag, upper, rhs):
    """Solve A y = rhs for tridiagonal A.

    lower[i] multiplies y[i-1] in row i (lower[0] ignored), upper[i]
    multiplies y[i+1] (upper[-1] ignored). Works for real and complex
    data; raises SingularLinearization if the factorization fails.
    """
    diag = np.asarray(diag)
    n = diag.shape[0]
    dtype = np.result_type(lower, diag, upper, rhs)
    ab = np.zeros((3, n), dtype=dtype)
    ab[0, 1:] = np.asarray(upper)[:-1]
    ab[1, :] = diag
    ab[2, :-1] = np.asarray(lower)[1:]
    try:
        # Finiteness is the caller's contract; skipping the scan keeps
        # the hot path cheap and lets divergence checks see the nans.
        return solve_banded((1, 1), ab, np.asarray(rhs, dtype=dtype),
                            check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularLinearization(str(exc)) from exc


def solve_cyclic(lower, diag, upper, rhs):
    """Solve the periodic tridiagonal system A y = rhs.

    Row i couples indices (i-1) % n, i, (i+1) % n with weights
    lower[i], diag[i], upper[i]; the wrap entries A[0, n-1] = lower[0]
    and A[n-1, 0] = upper[n-1] are folded in by a rank-one update.
    Requires n >= 3.
    """
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = diag.shape[0]
    if n < 3:
        raise ValueError("cyclic solve needs at least 3 unknowns")

    alpha = lower[0]   # A[0, n-1]
    beta = upper[-1]   # A[n-1, 0]
    if alpha == 0.0 and beta == 0.0:
        return solve_tridiagonal(lower, diag, upper, rhs)

    # A = T + u v^T with u = (gamma, 0, .., 0, beta), v = (1, 0, .., 0, alpha/gamma).
    gamma = -diag[0] if diag[0] != 0.0 else 1.0
    d = diag.copy()
    d[0] -= gamma
    d[-1] -= alpha * beta / gamma

    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = d
    ab[2, :-1] = lower[1:]

    u = np.zeros(n)
    u[0] = gamma
    u[-1] = beta
    try:
        y, z = solve_banded((1, 1), ab, np.column_stack([rhs, u]),
                            check_finite=False).T
    except np.linalg.LinAlgError as exc:
        raise SingularLinearization(str(exc)) from exc
    denom = 1.0 + z[0] + (alpha / gamma) * z[-1]
    if denom == 0.0 or not np.isfinite(denom):
        raise SingularLinearization("cyclic correction is singular")
    factor = (y[0] + (alpha / gamma) * y[-1]) / denom
    return y - factor * z

"""Dense linear solves for exact policy evaluation.

The policy-evaluation systems here are small (a few dozen unknowns) and of
the form ``(I - gamma * P) v = c`` with ``P`` row-stochastic and
``gamma < 1``, which keeps them strictly diagonally dominant and very well
conditioned. A direct Gaussian elimination with partial pivoting is exact
enough and keeps the dependency surface flat.
"""

from __future__ import annotations

import numpy as np

__all__ = ["SingularMatrixError", "solve_dense"]

# a pivot this small relative to its row's magnitude means the system is
# numerically singular
_PIVOT_RTOL = 1e-12


class SingularMatrixError(ValueError):
    """Raised when elimination meets a pivot that is effectively zero."""


def solve_dense(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``matrix @ x = rhs`` by Gaussian elimination with partial pivoting.

    Parameters
    ----------
    matrix : numpy.ndarray
        Square 2-D array. Not modified.
    rhs : numpy.ndarray
        1-D array with one entry per matrix row. Not modified.

    Returns
    -------
    numpy.ndarray
        The solution vector ``x``.

    Raises
    ------
    ValueError
        If the shapes are not a square system.
    SingularMatrixError
        If a pivot's magnitude falls below ``1e-12`` times the largest
        magnitude its row had in the original matrix.
    """
    a = np.array(matrix, dtype=float)
    b = np.array(rhs, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    n = a.shape[0]
    if b.shape != (n,):
        raise ValueError(f"rhs must have shape ({n},), got {b.shape}")

    # judge pivots against the row's original magnitude: rows of a
    # rank-deficient matrix cancel almost completely during elimination,
    # so their own residual entries are useless as a scale
    scale = np.max(np.abs(a), axis=1)
    for k in range(n):
        pivot_row = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[pivot_row, k]) <= _PIVOT_RTOL * scale[pivot_row]:
            raise SingularMatrixError(
                f"matrix is singular to working precision at column {k}"
            )
        if pivot_row != k:
            a[[k, pivot_row]] = a[[pivot_row, k]]
            b[[k, pivot_row]] = b[[pivot_row, k]]
            scale[[k, pivot_row]] = scale[[pivot_row, k]]
        factors = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k:] -= np.outer(factors, a[k, k:])
        b[k + 1 :] -= factors * b[k]

    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1 :] @ x[k + 1 :]) / a[k, k]
    return x

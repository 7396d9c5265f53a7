import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from migmdp import SingularMatrixError, solve_dense


def test_identity():
    b = np.array([3.0, -1.0, 2.0])
    assert np.array_equal(solve_dense(np.eye(3), b), b)


def test_diagonal():
    a = np.diag([2.0, 4.0])
    x = solve_dense(a, np.array([2.0, 8.0]))
    assert np.allclose(x, [1.0, 2.0], atol=1e-15)


def test_pivoting_required():
    # zero leading pivot forces a row swap
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    x = solve_dense(a, np.array([2.0, 3.0]))
    assert np.allclose(x, [3.0, 2.0], atol=1e-15)


def test_inputs_not_mutated():
    a = np.array([[4.0, 1.0], [2.0, 3.0]])
    b = np.array([1.0, 2.0])
    a_copy, b_copy = a.copy(), b.copy()
    solve_dense(a, b)
    assert np.array_equal(a, a_copy)
    assert np.array_equal(b, b_copy)


def test_all_zero_matrix_singular():
    with pytest.raises(SingularMatrixError):
        solve_dense(np.zeros((3, 3)), np.ones(3))


def test_duplicate_rows_singular():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrixError):
        solve_dense(a, np.array([1.0, 2.0]))


def test_rank_deficient_singular():
    a = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [5.0, 7.0, 9.0]])
    with pytest.raises(SingularMatrixError):
        solve_dense(a, np.ones(3))


def test_non_square_rejected():
    with pytest.raises(ValueError, match="square"):
        solve_dense(np.ones((2, 3)), np.ones(2))


def test_rhs_length_mismatch_rejected():
    with pytest.raises(ValueError, match="shape"):
        solve_dense(np.eye(3), np.ones(2))


def test_discounted_stochastic_residual():
    # the production use case: (I - gamma P) with P row-stochastic
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(2, 40))
        raw = rng.random((n, n))
        transitions = raw / raw.sum(axis=1, keepdims=True)
        gamma = float(rng.uniform(0.05, 0.99))
        a = np.eye(n) - gamma * transitions
        b = rng.uniform(-10, 10, n)
        x = solve_dense(a, b)
        residual = np.max(np.abs(a @ x - b))
        assert residual <= 1e-9 * (1.0 + np.max(np.abs(b)))


@given(st.integers(0, 2**32 - 1))
def test_round_trip_recovery(seed):
    # diagonally dominant systems recover a known solution accurately
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 20))
    a = rng.uniform(-1, 1, (n, n)) + n * np.eye(n)
    x_true = rng.uniform(-5, 5, n)
    x = solve_dense(a, a @ x_true)
    assert np.max(np.abs(x - x_true)) <= 1e-8 * max(1.0, np.max(np.abs(x_true)))

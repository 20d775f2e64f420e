import numpy as np
import pytest

from stokes0d import (SingularMatrixError, TripletMatrix, compress,
                      factorize, solve)


def test_duplicate_entries_sum():
    t = TripletMatrix(2, 2)
    t.add(0, 0, 1.0)
    t.add(0, 0, 2.0)
    c = t.compress()
    assert c.to_dense()[0, 0] == 3.0
    assert len(c.values) == 1


def test_empty_matrix_matvec():
    c = compress(TripletMatrix(3, 3))
    assert np.array_equal(c.matvec(np.ones(3)), np.zeros(3))


def test_out_of_range_indices():
    t = TripletMatrix(2, 2)
    with pytest.raises(IndexError):
        t.add(2, 0, 1.0)
    with pytest.raises(IndexError):
        t.extend([0, 1], [0, 5], [1.0, 1.0])


def test_matvec_against_dense_oracle():
    rng = np.random.default_rng(42)
    n = 50
    t = TripletMatrix(n, n)
    dense = np.zeros((n, n))
    for _ in range(400):
        i, j = rng.integers(0, n, 2)
        v = rng.standard_normal()
        t.add(int(i), int(j), float(v))
        dense[i, j] += v
    c = t.compress()
    x = rng.standard_normal(n)
    assert np.max(np.abs(c.matvec(x) - dense @ x)) <= 1e-13 * np.max(np.abs(dense @ x))


def test_identity_and_permutation_solves():
    t = TripletMatrix(3, 3)
    t.extend([0, 1, 2], [0, 1, 2], [1.0, 1.0, 1.0])
    f = factorize(t.compress())
    b = np.array([3.0, -1.0, 2.0])
    assert np.array_equal(solve(f, b), b)

    t = TripletMatrix(2, 2)
    t.extend([0, 1], [1, 0], [1.0, 1.0])   # requires pivoting
    f = factorize(t.compress())
    assert np.allclose(solve(f, np.array([1.0, 2.0])), [2.0, 1.0])


def test_residual_bound_random_system():
    rng = np.random.default_rng(7)
    n = 100
    dense = rng.standard_normal((n, n)) + n * np.eye(n)
    t = TripletMatrix(n, n)
    rows, cols = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    t.extend(rows, cols, dense)
    a = t.compress()
    x_star = rng.standard_normal(n)
    b = a.matvec(x_star)
    x = solve(factorize(a), b)
    anorm = np.max(np.abs(dense).sum(axis=1))
    bound = 1e-9 * (anorm * np.max(np.abs(x)) + np.max(np.abs(b)))
    assert np.max(np.abs(a.matvec(x) - b)) <= bound
    assert np.max(np.abs(x - x_star)) <= 1e-9 * np.max(np.abs(x_star))


def test_factor_once_solve_many_deterministic():
    rng = np.random.default_rng(3)
    n = 40
    t = TripletMatrix(n, n)
    for _ in range(300):
        t.add(int(rng.integers(n)), int(rng.integers(n)), float(rng.standard_normal()))
    for i in range(n):
        t.add(i, i, 10.0)
    f = factorize(t.compress())
    b = rng.standard_normal(n)
    x1 = solve(f, b)
    x2 = solve(f, b)
    assert x1.tobytes() == x2.tobytes()


def test_singular_matrix_names_pivot():
    t = TripletMatrix(3, 3)
    t.extend([0, 2], [0, 2], [1.0, 4.0])   # row/col 1 empty
    with pytest.raises(SingularMatrixError) as err:
        factorize(t.compress())
    assert err.value.pivot == 1
    assert "pivot index 1" in str(err.value)


def test_singular_dense_duplicated_column():
    # structurally full but exactly singular: both columns identical
    t = TripletMatrix(2, 2)
    t.extend([0, 0, 1, 1], [0, 1, 0, 1], [1.0, 1.0, 1.0, 1.0])
    with pytest.raises(SingularMatrixError) as err:
        factorize(t.compress())
    assert err.value.pivot == 1


def test_nonsquare_rejected():
    with pytest.raises(ValueError):
        factorize(compress(TripletMatrix(2, 3)))

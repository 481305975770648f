from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg

from matphi.densemat import (
    PhiContext,
    SingularPivotError,
    Structure,
    as_square_matrix,
    detect_structure,
    expm2x2,
    lu_solve_multi,
    matmul,
    one_norm,
    quasi_blocks,
    refresh_exp_diagonal,
    set_exp_blocks,
)

U = 2.0**-53


def test_matmul_counts_one_per_product(rng):
    ctx = PhiContext()
    a = rng.standard_normal((4, 4))
    matmul(a, a, ctx)
    ctx.matmul(a, a)
    assert ctx.count == 2
    ctx.reset()
    assert ctx.count == 0
    with pytest.raises(ValueError):
        matmul(a, np.ones((3, 3)))


def test_lu_solve_multi_cost_and_accuracy(rng):
    ctx = PhiContext()
    d = rng.standard_normal((6, 6)) + 6 * np.eye(6)
    b = rng.standard_normal((6, 6))
    x = lu_solve_multi(d, b, ctx)
    assert ctx.count == Fraction(4, 3)
    assert np.allclose(d @ x, b, atol=1e-13)


def test_lu_solve_identity_is_exact():
    b = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(lu_solve_multi(np.eye(3), b), b)


def test_lu_solve_singular():
    d = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularPivotError) as info:
        lu_solve_multi(d, np.eye(2))
    assert info.value.index == 1


def test_as_square_matrix_validation():
    with pytest.raises(ValueError):
        as_square_matrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        as_square_matrix(np.array([[np.nan]]))
    assert as_square_matrix([[1, 2], [3, 4]]).dtype == np.float64
    assert as_square_matrix([[1j]]).dtype == np.complex128


def test_one_norm():
    assert one_norm(np.array([[1.0, -2.0], [3.0, 0.5]])) == 4.0


def test_detect_structure_and_blocks():
    t = np.triu(np.ones((4, 4)))
    assert detect_structure(t) is Structure.UPPER_TRIANGULAR
    q = t.copy()
    q[1, 0] = 2.0
    assert detect_structure(q) is Structure.UPPER_QUASI_TRIANGULAR
    assert quasi_blocks(q) == [(0, 2), (2, 1), (3, 1)]
    q[2, 1] = 1.0  # two consecutive subdiagonal entries
    assert detect_structure(q) is Structure.FULL
    assert detect_structure(np.tril(np.ones((3, 3)))) is Structure.FULL
    assert Structure.FULL.triangular is False


finite = st.floats(-30, 30, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(finite, finite, finite, finite)
def test_expm2x2_matches_scipy(a, b, c, d):
    m = np.array([[a, b], [c, d]])
    ref = linalg.expm(m)
    got = expm2x2(m)
    scale = np.max(np.abs(ref))
    if np.isfinite(scale) and scale > 0:
        assert np.max(np.abs(got - ref)) <= 1e-11 * scale * max(1.0, np.max(np.abs(m)))


@pytest.mark.parametrize(
    "m",
    [
        [[0.0, 20.0], [-20.0, 0.0]],
        [[-1.0, 3.0], [-0.5, -1.0]],
        [[1.0, 1e4], [0.0, -1.0]],
        [[2.0, 1e-9], [1e-9, 2.0]],
        [[-10.0, 1.0], [0.0, 5.0]],
    ],
)
def test_expm2x2_special_cases(m):
    m = np.array(m)
    ref = linalg.expm(m)
    assert np.allclose(expm2x2(m), ref, rtol=1e-13, atol=1e-13 * np.max(np.abs(ref)))


def test_expm2x2_complex():
    m = np.array([[1 + 2j, 0.5], [-0.3j, -1.0]])
    assert np.allclose(expm2x2(m), linalg.expm(m), rtol=1e-13)


def test_set_exp_blocks_diagonal_exact():
    b = np.array([[-1.0, 2.0, 0.3], [0.0, 0.5, 1.0], [0.0, 0.0, 3.0]])
    x = set_exp_blocks(np.zeros((3, 3)), b)
    assert np.array_equal(np.diag(x), np.exp(np.diag(b)))
    ref = linalg.expm(b)
    assert np.allclose(np.diag(x, 1), np.diag(ref, 1), rtol=1e-14)
    assert x[0, 2] == 0  # only the first superdiagonal is refreshed


def test_refresh_keeps_triangular_and_counts(rng):
    a = np.triu(rng.standard_normal((5, 5)))
    ctx = PhiContext()
    x = linalg.expm(a / 2)
    y = refresh_exp_diagonal(x, a / 2, 1, ctx)
    assert ctx.count == 1
    assert not np.tril(y, -1).any()
    assert np.array_equal(np.diag(y), np.exp(np.diag(a)))
    assert np.allclose(y, linalg.expm(a), rtol=1e-12)
    with pytest.raises(ValueError):
        refresh_exp_diagonal(x, rng.standard_normal((5, 5)), 1)

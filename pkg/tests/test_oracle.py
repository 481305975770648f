import math

import flint
import mpmath
import numpy as np
import pytest

from matphi.oracle import (
    extended_matmul,
    extended_precision,
    phi_reference,
    phi_series_direct,
    phi_series_lifted,
    rel_error,
    scalar_phi,
    to_extended,
)


def test_zero_matrix_exact():
    ref = phi_reference(np.zeros((3, 3)), 3)
    for j, r in enumerate(ref):
        assert np.array_equal(r.to_numpy(), np.eye(3) / math.factorial(j))


def test_scalar_one():
    ref = phi_reference(np.array([[1.0]]), 2, digits=40)
    with mpmath.workdps(45):
        e = mpmath.e
        want = [e, e - 1, e - 2]
        for r, w in zip(ref, want):
            got = mpmath.mpf(r.mat[0, 0].mid().str(50, radius=False))
            assert abs(got / w - 1) < mpmath.mpf(10) ** -38


def test_nilpotent_exact():
    a = np.diag(np.ones(2), 1)
    ref = phi_reference(a, 1)
    a2 = a @ a
    assert np.array_equal(ref[0].to_numpy(), np.eye(3) + a + a2 / 2)
    with extended_precision(64):
        sixth = flint.arb(1) / 6
        assert abs(float(((ref[1].mat[0, 2] - sixth) / sixth).mid())) < 1e-64
    assert np.array_equal(ref[1].to_numpy(), np.eye(3) + a / 2 + a2 / 6)


def test_direct_series_examples(rng):
    assert np.allclose(phi_series_direct(np.eye(2), 0).to_numpy(), math.e * np.eye(2), rtol=1e-16)
    assert np.array_equal(phi_series_direct(np.zeros((2, 2)), 3).to_numpy(), np.eye(2) / 6)
    a = rng.standard_normal((4, 4))
    a /= 1.5 * np.max(np.sum(np.abs(a), axis=0))
    ref = phi_reference(a, 3)
    for j in range(4):
        assert rel_error(ref[j], phi_series_direct(a, j)) < 10.0 ** -(64 - 4)
    with pytest.raises(ValueError):
        phi_series_direct(4 * np.eye(2), 0)


def test_recurrence_identity_extended(rng):
    a = rng.standard_normal((5, 5))
    p = 4
    ref = phi_reference(a, p)
    ax = to_extended(a).mat
    with extended_precision(64):
        for j in range(p):
            rhs = (ax * ref[j + 1].mat).mid()
            for i in range(5):
                rhs[i, i] += flint.arb(1) / math.factorial(j)
            diff = (ref[j].mat - rhs).mid()
            num = max(sum(abs(float(diff[i, k])) for i in range(5)) for k in range(5))
            den = float(ref[j].one_norm())
            assert num / den < 1e-62


def test_dual_oracle_on_corpus(corpus):
    for cm in corpus:
        if cm.n > 20:
            continue
        ref = phi_reference(cm.a, 3)
        second = phi_series_lifted(cm.a, 3)
        for j in range(4):
            assert rel_error(ref[j], second[j]) < 10.0 ** -(64 - 4), cm.name


def test_scalar_phi_small_argument():
    vals = scalar_phi(1e-6, 3, digits=30)
    with mpmath.workdps(40):
        series = [sum(mpmath.mpf(1e-6) ** k / mpmath.factorial(k + j) for k in range(20)) for j in range(4)]
    for v, s in zip(vals, series):
        assert abs(v / s - 1) < 1e-28


def test_extended_matmul_and_rel_error(rng):
    a, b = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
    prod = extended_matmul(a, b)
    assert np.allclose(prod.to_numpy(), a @ b, rtol=1e-15)
    assert rel_error(prod, prod) == 0
    c = extended_matmul(a + 1j * b, b)
    assert c.is_complex and np.allclose(c.to_numpy(), (a + 1j * b) @ b)


def test_limits():
    with pytest.raises(ValueError):
        phi_reference(np.eye(2), 17)
    with pytest.raises(ValueError):
        phi_reference(np.eye(2), 2, digits=20)
    with pytest.raises(ValueError):
        phi_reference(np.eye(300), 10)

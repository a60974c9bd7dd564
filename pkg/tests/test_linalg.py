"""Dense linear algebra kernels: exponentials, Lyapunov, LU, resolvent."""
from __future__ import annotations

import numpy as np
import pytest

from kdvexact import (
    LyapunovSolveError,
    OverflowDetectedError,
    SingularMatrixError,
    SpecValidationError,
)
from kdvexact import linalg


def test_as_matrix_rejects_bad_inputs():
    with pytest.raises(SpecValidationError):
        linalg.as_matrix([1.0, 2.0], "v")
    with pytest.raises(SpecValidationError):
        linalg.as_matrix([[np.nan]], "m")
    with pytest.raises(SpecValidationError):
        linalg.as_matrix([[np.inf, 0.0]], "m")
    m = linalg.as_matrix([[1, 2], [3, 4]])
    assert m.dtype == np.float64 and m.shape == (2, 2)


def test_expm_rotation_closed_form():
    gen = np.array([[0.0, -1.0], [1.0, 0.0]])
    for theta in (0.1, 1.0, -2.5, np.pi):
        e = linalg.expm(gen, theta)
        want = np.array([[np.cos(theta), -np.sin(theta)],
                         [np.sin(theta), np.cos(theta)]])
        assert np.max(np.abs(e - want)) < 1e-14, theta


def test_expm_matches_taylor_series():
    rng = np.random.default_rng(3)
    for _ in range(5):
        m = rng.uniform(-0.5, 0.5, size=(3, 3))
        s = float(rng.uniform(-1.5, 1.5))
        term = np.eye(3)
        total = np.eye(3)
        for k in range(1, 40):
            term = term @ (s * m) / k
            total = total + term
        e = linalg.expm(m, s)
        assert np.max(np.abs(e - total)) < 1e-13


def test_expm_semigroup_and_commutation():
    rng = np.random.default_rng(11)
    for _ in range(5):
        m = rng.uniform(-1, 1, size=(4, 4))
        s, r = rng.uniform(-0.8, 0.8, size=2)
        left = linalg.expm(m, s + r)
        right = linalg.expm(m, s) @ linalg.expm(m, r)
        assert np.max(np.abs(left - right)) < 1e-12
        cube = m @ m @ m
        e = linalg.expm(m, s)
        comm = e @ cube - cube @ e
        assert np.max(np.abs(comm)) < 1e-12 * max(1.0, np.max(np.abs(cube)))


def test_expm_zero_scale_is_exact_identity():
    m = np.array([[1e6, 2e6], [3e6, 4e6]])
    assert np.array_equal(linalg.expm(m, 0.0), np.eye(2))


def test_expm_overflow_detected():
    with pytest.raises(OverflowDetectedError):
        linalg.expm(np.array([[1000.0]]), 1.0)


def test_lyapunov_scalar_and_diagonal():
    q = linalg.lyapunov_solve(np.array([[2.0]]), np.array([[3.0]]))
    assert abs(q[0, 0] - 0.75) < 1e-15
    lam = np.array([0.5, 1.5, 3.0])
    rhs = np.arange(1.0, 10.0).reshape(3, 3)
    q = linalg.lyapunov_solve(np.diag(lam), rhs)
    want = rhs / (lam[:, None] + lam[None, :])
    assert np.max(np.abs(q - want)) < 1e-14


def test_lyapunov_random_stable_residual():
    rng = np.random.default_rng(5)
    for _ in range(6):
        p = int(rng.integers(1, 7))
        base = rng.uniform(-1, 1, size=(p, p))
        a = base @ base.T + 0.5 * np.eye(p)   # SPD: spectrum strictly positive
        rhs = rng.uniform(-2, 2, size=(p, p))
        q = linalg.lyapunov_solve(a, rhs)
        resid = np.max(np.abs(a @ q + q @ a - rhs))
        assert resid < 1e-12 * max(1.0, np.max(np.abs(rhs))), (p, resid)


def test_lyapunov_resonant_pair_raises():
    a = np.diag([1.0, -1.0])
    with pytest.raises(LyapunovSolveError):
        linalg.lyapunov_solve(a, np.ones((2, 2)))


def test_lyapunov_dimension_cap():
    p = linalg.MAX_LYAPUNOV_DIM + 1
    with pytest.raises(SpecValidationError):
        linalg.lyapunov_solve(np.eye(p), np.eye(p))


def test_determinant_matches_cofactor_expansion():
    rng = np.random.default_rng(17)
    for _ in range(8):
        m = rng.uniform(-3, 3, size=(3, 3))
        a, b, c = m[0]
        d, e, f = m[1]
        g, h, i = m[2]
        want = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
        got = linalg.determinant(linalg.lu_factor(m))
        assert abs(got - want) <= 1e-12 * max(1.0, abs(want)), (got, want)


def test_singular_matrix_det_zero_but_solve_raises():
    m = np.array([[1.0, 2.0], [2.0, 4.0]])
    factors = linalg.lu_factor(m)
    assert linalg.determinant(factors) == 0.0
    with pytest.raises(SingularMatrixError):
        linalg.solve(factors, np.ones(2))
    with pytest.raises(SingularMatrixError):
        linalg.inverse(factors)


def test_eigenvalues_sorted_and_rotation_spectrum():
    m = np.diag([3.0, 1.0, 2.0])
    spec = linalg.eigenvalues(m)
    assert np.allclose(spec.eigenvalues, [1.0, 2.0, 3.0])
    assert spec.min_real_part == 1.0

    rot = np.array([[0.5, -np.sqrt(3) / 2], [np.sqrt(3) / 2, 0.5]])
    spec = linalg.eigenvalues(rot)
    assert np.allclose(spec.eigenvalues.real, [0.5, 0.5])
    assert np.allclose(np.sort(spec.eigenvalues.imag), [-np.sqrt(3) / 2, np.sqrt(3) / 2])
    assert abs(spec.min_real_part - 0.5) < 1e-15

    empty = linalg.eigenvalues(np.zeros((0, 0)))
    assert empty.min_real_part == np.inf


def test_resolvent_scalar_value():
    z = linalg.resolvent_apply(np.array([[1.0]]), 1.0 + 0j, np.array([[1.0]]))
    assert abs(z[0, 0] - (0.5 + 0.5j)) < 1e-15


def test_resolvent_matches_complex_solve():
    rng = np.random.default_rng(23)
    for _ in range(10):
        p = int(rng.integers(1, 6))
        a = rng.uniform(-2, 2, size=(p, p))
        b = rng.uniform(-2, 2, size=(p, 1))
        k = complex(rng.uniform(-3, 3), rng.uniform(0.5, 3))
        got = linalg.resolvent_apply(a, k, b)
        want = np.linalg.solve(k * np.eye(p) - 1j * a, b.astype(complex))
        assert np.max(np.abs(got - want)) < 1e-12, k


def test_resolvent_at_spectrum_point_raises():
    # k = i*lambda makes (kI - iA) exactly singular
    with pytest.raises(SingularMatrixError):
        linalg.resolvent_apply(np.array([[1.0]]), 1j, np.array([[1.0]]))


def test_resolvent_decays_like_one_over_k():
    rng = np.random.default_rng(29)
    a = rng.uniform(-1, 1, size=(3, 3))
    b = rng.uniform(-1, 1, size=(3, 1))
    n1 = np.max(np.abs(linalg.resolvent_apply(a, 100.0 + 0j, b)))
    n2 = np.max(np.abs(linalg.resolvent_apply(a, 1000.0 + 0j, b)))
    assert abs(n2 / n1 - 0.1) < 0.01

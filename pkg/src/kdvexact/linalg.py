"""Dense linear algebra kernels for the triplet solution machinery.

Thin, contract-enforcing wrappers around LAPACK-backed numpy/scipy
routines: matrix exponentials, the Lyapunov solve A Q + Q A = RHS via
the explicit Kronecker-sum system, pivoted LU with determinant and
solve helpers, eigenvalue extraction, and the complex resolvent apply
(k I - i A)^{-1} b computed through a real block embedding.

All routines work on real float64 matrices, detect overflow instead of
propagating NaN, and raise typed errors from `errors`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    ConvergenceError,
    LyapunovSolveError,
    OverflowDetectedError,
    SingularMatrixError,
    SpecValidationError,
)

# Default tolerances; every consumer can override per call.
RESIDUAL_TOL = 1e-12   # relative residual bound for verified solves
PIVOT_TOL = 1e-14      # singularity threshold, times max |entry|

MAX_LYAPUNOV_DIM = 64  # Kronecker system stays at most 4096 x 4096


def as_matrix(obj, name: str = "matrix") -> np.ndarray:
    """Validate and return a finite real 2-D float64 array.

    Raises SpecValidationError on wrong dimensionality or non-finite
    entries. The returned array is a fresh C-contiguous copy.
    """
    m = np.array(obj, dtype=float, order="C")
    if m.ndim != 2:
        raise SpecValidationError(f"{name}: expected a 2-D array, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise SpecValidationError(f"{name}: entries must be finite")
    return m


def _check_finite(m: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(m)):
        finite = m[np.isfinite(m)]
        mag = float(np.max(np.abs(finite))) if finite.size else float("inf")
        raise OverflowDetectedError(f"overflow in {what}", magnitude=mag)
    return m


def expm(m: np.ndarray, s: float = 1.0) -> np.ndarray:
    """Matrix exponential of s*m (scaling-and-squaring Pade).

    s = 0 returns the exact identity. Non-finite results raise
    OverflowDetectedError carrying the largest finite magnitude seen.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SpecValidationError(f"expm: square matrix required, got shape {m.shape}")
    if s == 0.0:
        return np.eye(m.shape[0])
    scaled = s * m
    if not np.all(np.isfinite(scaled)):
        raise OverflowDetectedError("overflow scaling the expm argument")
    with np.errstate(over="ignore", invalid="ignore"):
        result = sla.expm(scaled)
    return _check_finite(result, f"expm with ||sM||={np.max(np.abs(scaled)):.3g}")


def lyapunov_solve(a: np.ndarray, rhs: np.ndarray, residual_tol: float = RESIDUAL_TOL) -> np.ndarray:
    """Solve A Q + Q A = RHS through the Kronecker-sum linear system.

    The system matrix is kron(I, A) + kron(A^T, I) acting on the
    column-major vectorization of Q. Singular systems (some eigenvalue
    pair with lambda_i + lambda_j = 0) raise LyapunovSolveError, as does
    a solution whose residual exceeds residual_tol * max(1, ||RHS||_inf).
    """
    a = np.asarray(a, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    p = a.shape[0]
    if a.shape != (p, p) or rhs.shape != (p, p):
        raise SpecValidationError(
            f"lyapunov_solve: shapes {a.shape} and {rhs.shape} must both be ({p}, {p})")
    if p > MAX_LYAPUNOV_DIM:
        raise SpecValidationError(
            f"lyapunov_solve: dimension {p} exceeds the supported cap {MAX_LYAPUNOV_DIM}")
    kron = np.kron(np.eye(p), a) + np.kron(a.T, np.eye(p))
    try:
        factors = lu_factor(kron, pivot_tol=PIVOT_TOL)
        q_vec = solve(factors, rhs.flatten(order="F"))
    except SingularMatrixError as exc:
        raise LyapunovSolveError(
            "Lyapunov system is singular: some eigenvalue pair sums to zero "
            f"(pivot {exc.pivot:.3e})") from exc
    q = q_vec.reshape((p, p), order="F")
    scale = max(1.0, float(np.max(np.abs(rhs)))) if rhs.size else 1.0
    resid = float(np.max(np.abs(a @ q + q @ a - rhs)))
    if not resid <= residual_tol * scale:
        raise LyapunovSolveError(
            f"Lyapunov residual {resid:.3e} exceeds {residual_tol:.1e} * {scale:.3e}")
    return q


@dataclass(frozen=True)
class LuFactors:
    """Pivoted LU factorization of a square matrix.

    lu and piv are the packed scipy factors; max_abs is the largest
    absolute entry of the original matrix, used for relative pivot
    thresholds.
    """

    lu: np.ndarray
    piv: np.ndarray
    max_abs: float

    @property
    def n(self) -> int:
        return self.lu.shape[0]

    def min_pivot(self) -> float:
        return float(np.min(np.abs(np.diag(self.lu)))) if self.n else 0.0

    def permutation_sign(self) -> float:
        sign = 1.0
        for i, p in enumerate(self.piv):
            if p != i:
                sign = -sign
        return sign


def lu_factor(m: np.ndarray, pivot_tol: float = PIVOT_TOL) -> LuFactors:
    """Factor a square matrix with partial pivoting."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SpecValidationError(f"lu_factor: square matrix required, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise OverflowDetectedError("overflow in lu_factor input")
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # scipy warns on exact singularity; we diagnose via pivots
        lu, piv = sla.lu_factor(m, check_finite=False)
    return LuFactors(lu=lu, piv=piv, max_abs=float(np.max(np.abs(m))) if m.size else 0.0)


def determinant(factors: LuFactors) -> float:
    """Determinant from the LU diagonal; overflow raises, zero is fine."""
    diag = np.diag(factors.lu)
    det = factors.permutation_sign() * float(np.prod(diag))
    if not np.isfinite(det):
        # recompute in log space to report the magnitude before failing
        with np.errstate(divide="ignore"):
            log_mag = float(np.sum(np.log(np.abs(diag))))
        raise OverflowDetectedError(
            f"determinant overflow, log|det| = {log_mag:.6g}", magnitude=log_mag)
    return det


def _require_nonsingular(factors: LuFactors, pivot_tol: float, what: str) -> None:
    pivot = factors.min_pivot()
    if pivot <= pivot_tol * max(factors.max_abs, 1e-300):
        raise SingularMatrixError(
            f"{what}: matrix is singular to working precision (pivot {pivot:.3e})",
            pivot=pivot)


def solve(factors: LuFactors, rhs: np.ndarray, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """Back-substitute rhs through the factorization."""
    _require_nonsingular(factors, pivot_tol, "solve")
    rhs = np.asarray(rhs, dtype=float)
    out = sla.lu_solve((factors.lu, factors.piv), rhs, check_finite=False)
    return _check_finite(out, "solve")


def inverse(factors: LuFactors, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """Explicit inverse via solves against the identity."""
    return solve(factors, np.eye(factors.n), pivot_tol=pivot_tol)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a real matrix and their smallest real part."""

    eigenvalues: np.ndarray  # complex, sorted by (real, imag)
    min_real_part: float


def eigenvalues(m: np.ndarray) -> Spectrum:
    """Full eigenvalue set as a Spectrum."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SpecValidationError(f"eigenvalues: square matrix required, got shape {m.shape}")
    if m.size == 0:
        return Spectrum(eigenvalues=np.zeros(0, complex), min_real_part=float("inf"))
    try:
        vals = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration failed: {exc}") from exc
    order = np.lexsort((vals.imag, vals.real))
    vals = vals[order]
    return Spectrum(eigenvalues=vals, min_real_part=float(np.min(vals.real)))


def resolvent_apply(a: np.ndarray, k: complex, b: np.ndarray,
                    pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """Solve (k I - i A) z = b for complex k and real A, b.

    Uses the real 2P x 2P block embedding
        [[Re(k) I, -(Im(k) I - A)], [Im(k) I - A, Re(k) I]]
    so only real LU machinery is needed. k equal to i times an
    eigenvalue of A makes the system singular and raises
    SingularMatrixError.
    """
    a = np.asarray(a, dtype=float)
    p = a.shape[0]
    b = np.asarray(b, dtype=float)
    squeeze = b.ndim == 1
    bc = b.reshape(p, -1)
    k = complex(k)
    im_block = k.imag * np.eye(p) - a
    re_block = k.real * np.eye(p)
    big = np.block([[re_block, -im_block], [im_block, re_block]])
    rhs = np.vstack([bc, np.zeros_like(bc)])
    sol = solve(lu_factor(big, pivot_tol=pivot_tol), rhs, pivot_tol=pivot_tol)
    z = sol[:p] + 1j * sol[p:]
    return z[:, 0] if squeeze else z

"""Dense log-determinants, Levinson recursion, polynomial roots and FFT.

All determinant work is done in log space: the matrices met here (Folner
truncations up to ~1300 rows) have determinants far outside double range.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from . import kernels
from .errors import ConvergenceError, NotPositiveDefiniteError, NumericError, ParameterError, PreconditionError

ZERO_PIVOT = 1e-300
HERMITIAN_TOL = 1e-10
CLUSTER_RADIUS = 1e-7


@dataclass(frozen=True)
class LogDet:
    value: float  # log|det|, -inf when a pivot vanished
    zero_pivot: bool = False

    def __float__(self):
        return self.value


def _as_square(M) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ParameterError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NumericError("matrix has non-finite entries")
    return M


def lu_logabsdet(M) -> LogDet:
    """log|det M| from an LU factorisation with partial pivoting (LAPACK getrf)."""
    M = _as_square(M)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)  # exact singularity is reported below
        lu, _ = sla.lu_factor(M, check_finite=False)
    pivots = np.abs(np.diagonal(lu))
    if pivots.min() < ZERO_PIVOT:
        return LogDet(-math.inf, True)
    return LogDet(float(np.sum(np.log(pivots))))


def cholesky_factor(M) -> np.ndarray:
    """Lower Cholesky factor of a Hermitian positive definite matrix."""
    M = _as_square(M)
    scale = max(1.0, float(np.abs(M).max()))
    if np.abs(M - M.conj().T).max() > HERMITIAN_TOL * scale:
        raise PreconditionError("matrix is not Hermitian")
    fn = lapack.zpotrf if np.iscomplexobj(M) else lapack.dpotrf
    L, info = fn(M, lower=True, clean=True, overwrite_a=False)
    if info > 0:
        raise NotPositiveDefiniteError("non-positive pivot in Cholesky factorisation", index=int(info))
    if info < 0:
        raise NumericError(f"LAPACK potrf argument error {info}")
    # a pivot at roundoff level means the matrix is only semidefinite in floating point
    floor = M.shape[0] * np.finfo(float).eps * float(np.abs(np.diagonal(M)).max(initial=0.0))
    small = np.flatnonzero(np.abs(np.diagonal(L)) ** 2 <= floor)
    if small.size:
        raise NotPositiveDefiniteError("pivot lost to roundoff in Cholesky factorisation", index=int(small[0]) + 1)
    return L


def cholesky_logdet(M) -> LogDet:
    """log det M = 2 sum log L_ii for Hermitian positive definite M."""
    L = cholesky_factor(M)
    diag = np.abs(np.diagonal(L))
    if diag.min() < ZERO_PIVOT:
        return LogDet(-math.inf, True)
    return LogDet(float(2.0 * np.sum(np.log(diag))))


def toeplitz_logdet_sequence(moments) -> np.ndarray:
    """log D_k, k = 1..n, for the Hermitian Toeplitz matrices T[i, j] = c_{j-i}.

    ``moments`` holds c_0, ..., c_{n-1} (c_{-m} = conj(c_m) is implied).
    Levinson-Durbin, O(n^2) overall.
    """
    c = np.asarray(moments, dtype=np.complex128)
    if c.ndim != 1 or len(c) < 1:
        raise ParameterError("need at least the moment c_0")
    logs, fail = kernels.levinson_logdet(c)
    if fail != -1:
        raise NotPositiveDefiniteError("Levinson recursion broke down", index=int(fail))
    return np.asarray(logs)


def toeplitz_matrix(moments, n: int | None = None) -> np.ndarray:
    c = np.asarray(moments, dtype=np.complex128)
    n = len(c) if n is None else n
    c = np.concatenate([c, np.zeros(max(0, n - len(c)), dtype=complex)])[:n]
    return sla.toeplitz(np.conj(c), c)


# --------------------------------------------------------------------------
# roots


@dataclass(frozen=True)
class Roots:
    roots: np.ndarray
    clusters: list = field(default_factory=list)  # [(centre, multiplicity)]
    sweeps: int = 0
    residuals: np.ndarray | None = None

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _initial_guesses(a: np.ndarray) -> np.ndarray:
    n = len(a) - 1
    radius = abs(a[0] / a[-1]) ** (1.0 / n)
    if not np.isfinite(radius) or radius == 0:
        radius = 1.0
    return radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))


def poly_roots(coeffs, tol: float = 1e-13, maxiter: int = 500) -> Roots:
    """Roots of sum_k coeffs[k] x^k by Aberth-Ehrlich iteration.

    Each root must satisfy |p(z)| <= 1e-8 * sum_k |a_k| max(1, |z|)^k, else
    ``ConvergenceError`` carries the residuals.
    """
    a = np.asarray(coeffs, dtype=np.complex128)
    if a.ndim != 1 or len(a) < 2:
        raise ParameterError("polynomial degree must be >= 1")
    if a[-1] == 0:
        raise ParameterError("leading coefficient is zero")
    n = len(a) - 1
    if n == 1:
        z = np.array([-a[0] / a[1]])
        sweeps = 0
    else:
        z, sweeps, _ = kernels.aberth(a, _initial_guesses(a), tol, maxiter)
        z = np.asarray(z)
    residual = np.abs(np.polynomial.polynomial.polyval(z, a))
    big = np.maximum(1.0, np.abs(z))
    bound = 1e-8 * np.array([np.sum(np.abs(a) * b ** np.arange(n + 1)) for b in big])
    if not np.all(residual <= bound):
        raise ConvergenceError(f"root finder did not converge in {maxiter} sweeps", residual)
    return Roots(z, cluster_roots(z), sweeps, residual)


def cluster_roots(z, radius: float = CLUSTER_RADIUS) -> list:
    """Greedy clustering; returns (mean, count) pairs."""
    remaining = list(np.asarray(z))
    out = []
    while remaining:
        seed = remaining.pop(0)
        group = [seed] + [w for w in remaining if abs(w - seed) <= radius]
        remaining = [w for w in remaining if abs(w - seed) > radius]
        out.append((complex(np.mean(group)), len(group)))
    return out


# --------------------------------------------------------------------------
# FFT


def fft(x) -> np.ndarray:
    """Unnormalised DFT X_k = sum_j x_j exp(-2 pi i jk/n); any length."""
    return np.fft.fft(np.asarray(x, dtype=np.complex128))


def ifft(X) -> np.ndarray:
    return np.fft.ifft(np.asarray(X, dtype=np.complex128))


def dft_direct(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    n = len(x)
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) @ x

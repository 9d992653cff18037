"""Pure numpy implementations of the hot kernels (fallback for ``_kernels``).

Each function has the same signature and return convention as its compiled
counterpart in ``_kernels.pyx``.
"""
import numpy as np

_EPS = np.finfo(float).eps


def levinson_logdet(c):
    """Log leading principal minors of the Hermitian Toeplitz matrix T[i, j] = c[j - i].

    Returns ``(logs, fail)`` where ``logs[k-1] = log D_k`` and ``fail`` is the
    first k whose prediction error is not positive (-1 when none).
    """
    c = np.asarray(c, dtype=np.complex128)
    n = len(c)
    logs = np.empty(n)
    if n == 0:
        return logs, -1
    e = c[0].real
    if not e > 0:
        return logs[:0], 1
    a = np.zeros(n, dtype=np.complex128)
    a[0] = 1.0
    logs[0] = np.log(e)
    for k in range(1, n):
        # reflection coefficient from the forward predictor a[0..k-1]
        acc = np.dot(a[:k], c[k:0:-1])
        kappa = -acc / e
        a[: k + 1] = a[: k + 1] + kappa * np.conj(a[k::-1])
        e = e * (1.0 - (kappa.real**2 + kappa.imag**2))
        if not e > 0:
            return logs[:k], k + 1
        logs[k] = logs[k - 1] + np.log(e)
    return logs, -1


def _horner(coeffs, z):
    """p(z), p'(z) and sum |a_k||z|^k for ascending coefficients, vectorised in z."""
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    scale = np.zeros(z.shape)
    az = np.abs(z)
    for a in coeffs[::-1]:
        dp = dp * z + p
        p = p * z + a
        scale = scale * az + abs(a)
    return p, dp, scale


def aberth(coeffs, z, tol, maxiter):
    """Aberth-Ehrlich iteration (simultaneous form) from starting points ``z``.

    A root is frozen once its correction falls below ``tol`` (relative) or
    its residual reaches the rounding level.  Returns ``(z, sweeps, done)``.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    z = np.array(z, dtype=np.complex128)
    m = len(z)
    active = np.ones(m, dtype=bool)
    sweeps = 0
    while sweeps < maxiter and active.any():
        sweeps += 1
        idx = np.flatnonzero(active)
        zi = z[idx]
        p, dp, scale = _horner(coeffs, zi)
        small = np.abs(p) <= 4 * _EPS * scale
        diff = zi[:, None] - z[None, :]
        diff[np.arange(len(idx)), idx] = 1.0
        inv = 1.0 / diff
        inv[np.arange(len(idx)), idx] = 0.0
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            w = ratio / (1.0 - ratio * s)
        w[small | ~np.isfinite(w)] = 0.0
        z[idx] = zi - w
        stop = small | (np.abs(w) <= tol * np.maximum(1.0, np.abs(zi)))
        active[idx[stop]] = False
    return z, sweeps, not active.any()


def relation_discrepancy(succ1, succ2, lmax):
    """Shortest freely reduced word (length < lmax) that is a relation in exactly one ball.

    ``succ`` tables come from ``labeled_ball`` (columns 2i / 2i+1 are s_i /
    s_i^-1, vertex 0 the identity).  Returns ``(length, words)`` with length
    0 when the relation sets agree up to length lmax - 1; ``words`` counts
    the enumerated words.
    """
    succ1 = np.asarray(succ1)
    succ2 = np.asarray(succ2)
    labels = succ1.shape[1]
    v1 = np.zeros(1, dtype=np.int64)
    v2 = np.zeros(1, dtype=np.int64)
    last = np.full(1, -1, dtype=np.int64)
    words = 0
    for length in range(1, lmax):
        nv1, nv2, nlast = [], [], []
        for lab in range(labels):
            keep = last != (lab ^ 1)
            nv1.append(succ1[v1[keep], lab])
            nv2.append(succ2[v2[keep], lab])
            nlast.append(np.full(int(keep.sum()), lab, dtype=np.int64))
        v1 = np.concatenate(nv1)
        v2 = np.concatenate(nv2)
        last = np.concatenate(nlast)
        words += len(v1)
        if np.any((v1 == 0) != (v2 == 0)):
            return length, words
    return 0, words


def eval_points(exps, coeffs, thetas, chunk=4096):
    """sum_nu c_nu exp(2 pi i (nu, theta)) for each row theta."""
    exps = np.asarray(exps, dtype=np.float64)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    thetas = np.asarray(thetas, dtype=np.float64)
    out = np.empty(len(thetas), dtype=np.complex128)
    for start in range(0, len(thetas), chunk):
        phase = thetas[start : start + chunk] @ exps.T
        # reduce mod 1 before scaling to keep the phase accurate for large exponents
        phase -= np.floor(phase)
        out[start : start + chunk] = np.exp(2j * np.pi * phase) @ coeffs
    return out

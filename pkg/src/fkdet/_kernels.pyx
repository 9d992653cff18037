# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.  Same contracts as ``_pykernels``."""
import numpy as np

from libc.math cimport log, sqrt, fabs, floor, sin, cos, M_PI
from libc.stdlib cimport malloc, free

cdef double _EPS = 2.220446049250313e-16


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double _cabs(double complex z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


def levinson_logdet(c):
    cdef const double complex[::1] cv = np.ascontiguousarray(c, dtype=np.complex128)
    cdef Py_ssize_t n = cv.shape[0]
    logs_arr = np.empty(n, dtype=np.float64)
    if n == 0:
        return logs_arr, -1
    cdef double[::1] logs = logs_arr
    a_arr = np.zeros(n, dtype=np.complex128)
    tmp_arr = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] a = a_arr
    cdef double complex[::1] tmp = tmp_arr
    cdef double e = cv[0].real
    cdef double complex acc, kappa
    cdef Py_ssize_t k, j
    cdef int fail = -1
    if not e > 0:
        return logs_arr[:0], 1
    a[0] = 1.0
    logs[0] = log(e)
    with nogil:
        for k in range(1, n):
            acc = 0
            for j in range(k):
                acc = acc + a[j] * cv[k - j]
            kappa = -acc / e
            for j in range(k + 1):
                tmp[j] = a[j] + kappa * a[k - j].conjugate()
            for j in range(k + 1):
                a[j] = tmp[j]
            e = e * (1.0 - _abs2(kappa))
            if not e > 0:
                fail = <int>(k + 1)
                break
            logs[k] = logs[k - 1] + log(e)
    if fail != -1:
        return logs_arr[: fail - 1], fail
    return logs_arr, -1


def aberth(coeffs, z0, double tol, int maxiter):
    """Gauss-Seidel Aberth-Ehrlich sweeps; returns (z, sweeps, converged)."""
    cdef const double complex[::1] a = np.ascontiguousarray(coeffs, dtype=np.complex128)
    z_arr = np.array(z0, dtype=np.complex128)
    cdef double complex[::1] z = z_arr
    cdef Py_ssize_t m = z.shape[0], deg = a.shape[0] - 1
    active_arr = np.ones(m, dtype=np.uint8)
    cdef unsigned char[::1] active = active_arr
    cdef Py_ssize_t i, j, k, nactive = m
    cdef int sweeps = 0
    cdef double complex p, dp, s, ratio, w, zi
    cdef double scale, az
    with nogil:
        while sweeps < maxiter and nactive > 0:
            sweeps += 1
            for i in range(m):
                if not active[i]:
                    continue
                zi = z[i]
                p = 0
                dp = 0
                scale = 0
                az = _cabs(zi)
                for k in range(deg, -1, -1):
                    dp = dp * zi + p
                    p = p * zi + a[k]
                    scale = scale * az + _cabs(a[k])
                if _cabs(p) <= 4 * _EPS * scale:
                    active[i] = 0
                    nactive -= 1
                    continue
                s = 0
                for j in range(m):
                    if j != i:
                        s = s + 1.0 / (zi - z[j])
                ratio = p / dp
                w = ratio / (1.0 - ratio * s)
                if w != w:  # nan from dp == 0
                    w = 0
                z[i] = zi - w
                if _cabs(w) <= tol * (az if az > 1.0 else 1.0):
                    active[i] = 0
                    nactive -= 1
    return z_arr, sweeps, nactive == 0


def relation_discrepancy(succ1, succ2, int lmax):
    """Depth-first version of the reduced-word walk; returns (length, words)."""
    cdef const long long[:, ::1] s1 = np.ascontiguousarray(succ1, dtype=np.int64)
    cdef const long long[:, ::1] s2 = np.ascontiguousarray(succ2, dtype=np.int64)
    cdef int labels = s1.shape[1]
    if lmax < 2:
        return 0, 0
    cdef int best = lmax  # sentinel: no discrepancy below lmax
    cdef long long words = 0
    cdef int depth
    cdef long long *st1 = <long long *> malloc(lmax * sizeof(long long))
    cdef long long *st2 = <long long *> malloc(lmax * sizeof(long long))
    cdef int *lab = <int *> malloc(lmax * sizeof(int))
    cdef int *last = <int *> malloc(lmax * sizeof(int))
    cdef long long u1, u2
    cdef int l
    if st1 == NULL or st2 == NULL or lab == NULL or last == NULL:
        free(st1); free(st2); free(lab); free(last)
        raise MemoryError()
    try:
        with nogil:
            st1[0] = 0
            st2[0] = 0
            last[0] = -1
            lab[0] = 0
            depth = 0
            while depth >= 0:
                l = lab[depth]
                if l >= labels or depth + 1 >= best:
                    depth -= 1
                    continue
                lab[depth] = l + 1
                if last[depth] >= 0 and l == (last[depth] ^ 1):
                    continue
                u1 = s1[st1[depth], l]
                u2 = s2[st2[depth], l]
                words += 1
                if (u1 == 0) != (u2 == 0):
                    best = depth + 1
                    continue
                if depth + 2 < best and u1 >= 0 and u2 >= 0:
                    depth += 1
                    st1[depth] = u1
                    st2[depth] = u2
                    last[depth] = l
                    lab[depth] = 0
    finally:
        free(st1); free(st2); free(lab); free(last)
    return (0 if best == lmax else best), words


def eval_points(exps, coeffs, thetas):
    cdef const long long[:, ::1] e = np.ascontiguousarray(exps, dtype=np.int64)
    cdef const double complex[::1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef const double[:, ::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef Py_ssize_t npts = th.shape[0], nterms = e.shape[0], d = e.shape[1]
    out_arr = np.empty(npts, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t p, t, k
    cdef double phase
    cdef double complex acc
    with nogil:
        for p in range(npts):
            acc = 0
            for t in range(nterms):
                phase = 0
                for k in range(d):
                    phase = phase + e[t, k] * th[p, k]
                phase = 2 * M_PI * (phase - floor(phase))
                acc = acc + c[t] * (cos(phase) + 1j * sin(phase))
            out[p] = acc
    return out_arr

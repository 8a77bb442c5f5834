# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, sqrt, fabs, M_PI

cnp.import_array()


cdef inline double _sinc(double x) nogil:
    if fabs(x) < 1e-8:
        return 1.0 - x * x / 6.0
    return sin(x) / x


def envelope_sum(const double complex[::1] c, double alpha_s, double alpha_i,
                 const long[::1] ls, const long[::1] li):
    cdef Py_ssize_t npts = ls.shape[0]
    cdef Py_ssize_t nl = c.shape[0]
    cdef long L = (nl - 1) // 2
    cdef Py_ssize_t p, k
    cdef long j, lo_s, hi_s, lo_i, hi_i
    cdef double complex acc
    out = np.empty(npts, dtype=np.complex128)
    cdef double complex[::1] o = out
    if npts == 0:
        return out
    # every sinc argument is an integer multiple of alpha/2: tabulate once
    lo_s = hi_s = ls[0]
    lo_i = hi_i = li[0]
    for p in range(npts):
        lo_s = min(lo_s, ls[p])
        hi_s = max(hi_s, ls[p])
        lo_i = min(lo_i, li[p])
        hi_i = max(hi_i, li[p])
    lo_s -= L
    hi_s += L
    lo_i -= L
    hi_i += L
    cdef double[::1] ts = np.empty(hi_s - lo_s + 1)
    cdef double[::1] ti = np.empty(hi_i - lo_i + 1)
    with nogil:
        for j in range(lo_s, hi_s + 1):
            ts[j - lo_s] = _sinc(j * alpha_s * 0.5)
        for j in range(lo_i, hi_i + 1):
            ti[j - lo_i] = _sinc(j * alpha_i * 0.5)
        for p in range(npts):
            acc = 0
            for k in range(nl):
                acc = acc + c[k] * (ts[ls[p] - (k - L) - lo_s] * ti[li[p] + (k - L) - lo_i])
            o[p] = acc
    return out


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
cdef double[::1] GL_X = _GL_X
cdef double[::1] GL_W = _GL_W


def arc_quadrature(double lo, double hi, long l, long npts):
    cdef long panels = max(1, npts // 8)
    cdef double h = (hi - lo) / panels
    cdef double re = 0.0, im = 0.0, mid, phi
    cdef long k, j
    with nogil:
        for k in range(panels):
            mid = lo + (k + 0.5) * h
            for j in range(8):
                phi = mid + 0.5 * h * GL_X[j]
                re += GL_W[j] * cos(l * phi)
                im -= GL_W[j] * sin(l * phi)
    return complex(re, im) * (0.5 * h) / (2.0 * M_PI)


def jacobi_eigh(a_in, double tol=1e-14, int max_sweeps=100, bint vectors=False):
    cdef double complex[:, ::1] a = np.array(a_in, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = a.shape[0]
    v_arr = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef double off, scale, r, tau, t, cs, sn, app, aqq
    cdef double complex ph, aconj, akp, akq, apk, aqk
    scale = 0.0
    for p in range(n):
        for q in range(n):
            scale += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
    scale = sqrt(scale)
    if scale == 0.0:
        return np.zeros(n), (v_arr if vectors else None), 0
    with nogil:
        while sweep < max_sweeps:
            off = 0.0
            for p in range(n):
                for q in range(p + 1, n):
                    off += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
            if sqrt(2.0 * off) <= tol * scale:
                break
            sweep += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    r = sqrt(a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag)
                    if r <= 1e-300:
                        continue
                    ph = a[p, q] / r
                    aconj = ph.conjugate()
                    app = a[p, p].real
                    aqq = a[q, q].real
                    tau = (aqq - app) / (2.0 * r)
                    if tau >= 0:
                        t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                    cs = 1.0 / sqrt(1.0 + t * t)
                    sn = t * cs
                    # columns: A <- A J with J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                    for k in range(n):
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = cs * akp - sn * aconj * akq
                        a[k, q] = sn * akp + cs * aconj * akq
                    # rows: A <- J^H A
                    for k in range(n):
                        apk = a[p, k]
                        aqk = a[q, k]
                        a[p, k] = cs * apk - sn * ph * aqk
                        a[q, k] = sn * apk + cs * ph * aqk
                    a[p, q] = 0
                    a[q, p] = 0
                    a[p, p] = a[p, p].real
                    a[q, q] = a[q, q].real
                    if vectors:
                        for k in range(n):
                            akp = v[k, p]
                            akq = v[k, q]
                            v[k, p] = cs * akp - sn * aconj * akq
                            v[k, q] = sn * akp + cs * aconj * akq
    w = np.array([a[k, k].real for k in range(n)])
    return w, (v_arr if vectors else None), sweep

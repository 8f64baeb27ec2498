# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch evaluation of packed sparse polynomials and twisted binomials."""

import numpy as np
cimport numpy as cnp
from libc.math cimport M_PI, fmax

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double cabs(double complex)

cnp.import_array()


cdef inline double complex _ipow(double complex x, long k) nogil:
    cdef double complex r = 1.0
    while k > 0:
        if k & 1:
            r = r * x
        x = x * x
        k >>= 1
    return r


def eval_packed(const long long[:, ::1] exps, const double complex[::1] coeffs,
                const long long[::1] offsets, const double complex[:, ::1] points):
    cdef Py_ssize_t npts = points.shape[0], nvars = exps.shape[1]
    cdef Py_ssize_t npoly = offsets.shape[0] - 1
    cdef Py_ssize_t nterms = exps.shape[0]
    out = np.zeros((npts, npoly), dtype=np.complex128)
    if nterms == 0 or npts == 0:
        return out
    cdef double complex[:, ::1] res = out
    cdef long long maxdeg = max(1, int(np.asarray(exps).max()))
    # per-point table of x_v^e for e <= maxdeg
    table_buf = np.empty((nvars, maxdeg + 1), dtype=np.complex128)
    cdef double complex[:, ::1] table = table_buf
    cdef Py_ssize_t p, q, term, v, e
    cdef double complex acc, mono, x
    with nogil:
        for p in range(npts):
            for v in range(nvars):
                x = points[p, v]
                table[v, 0] = 1.0
                for e in range(1, maxdeg + 1):
                    table[v, e] = table[v, e - 1] * x
            for q in range(npoly):
                acc = 0.0
                for term in range(offsets[q], offsets[q + 1]):
                    mono = coeffs[term]
                    for v in range(nvars):
                        e = exps[term, v]
                        if e:
                            mono = mono * table[v, e]
                    acc = acc + mono
                res[p, q] = acc
    return out


def twisted_residuals(const long long[:, ::1] beta_plus, const long long[:, ::1] beta_minus,
                      const double complex[:, ::1] lam_plus, const double complex[:, ::1] lam_minus,
                      const double complex[:, ::1] t):
    cdef Py_ssize_t npts = t.shape[0], n = t.shape[1], ne = beta_plus.shape[0]
    out = np.zeros((npts, ne), dtype=np.complex128)
    cdef double complex[:, ::1] res = out
    cdef Py_ssize_t p, b, j
    cdef double complex a, c, twist = -2j * M_PI
    with nogil:
        for p in range(npts):
            for b in range(ne):
                a = cexp(twist * lam_plus[p, b])
                c = cexp(twist * lam_minus[p, b])
                for j in range(n):
                    if beta_plus[b, j]:
                        a = a * _ipow(t[p, j], beta_plus[b, j])
                    if beta_minus[b, j]:
                        c = c * _ipow(t[p, j], beta_minus[b, j])
                res[p, b] = (a - c) / fmax(1.0, fmax(cabs(a), cabs(c)))
    return out

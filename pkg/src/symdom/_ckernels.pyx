# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled log-generic-norm kernels over stacks of small matrices."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, NAN

cnp.import_array()


def logdet_unit_minus_gram(double complex[:, :, ::1] z):
    """log det(I - Z Z^*) for each p x q matrix in the stack; NaN unless positive definite."""
    cdef Py_ssize_t m = z.shape[0], p = z.shape[1], q = z.shape[2]
    cdef Py_ssize_t k, i, j, l
    cdef double complex acc
    cdef double d, total
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m)
    cdef double complex[:, ::1] a = np.empty((p, p), dtype=np.complex128)
    for k in range(m):
        # a = I - Z Z^*, lower triangle only
        for i in range(p):
            for j in range(i + 1):
                acc = 0
                for l in range(q):
                    acc = acc + z[k, i, l] * z[k, j, l].conjugate()
                a[i, j] = -acc
            a[i, i] = a[i, i] + 1.0
        # in-place Cholesky, a = L L^*
        total = 0.0
        for j in range(p):
            d = a[j, j].real
            for l in range(j):
                d -= a[j, l].real * a[j, l].real + a[j, l].imag * a[j, l].imag
            if not d > 0.0:
                total = NAN
                break
            d = d ** 0.5
            a[j, j] = d
            total += 2.0 * log(d)
            for i in range(j + 1, p):
                acc = a[i, j]
                for l in range(j):
                    acc = acc - a[i, l] * a[j, l].conjugate()
                a[i, j] = acc / d
        out[k] = total
    return out


def log_lie_ball_norm(double complex[:, ::1] z):
    """log(1 - 2|z|^2 + |z^t z|^2) for each row; NaN outside the Lie ball."""
    cdef Py_ssize_t m = z.shape[0], n = z.shape[1]
    cdef Py_ssize_t k, i
    cdef double nrm2, h
    cdef double complex t
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m)
    for k in range(m):
        nrm2 = 0.0
        t = 0
        for i in range(n):
            nrm2 += z[k, i].real * z[k, i].real + z[k, i].imag * z[k, i].imag
            t = t + z[k, i] * z[k, i]
        h = 1.0 - 2.0 * nrm2 + (t.real * t.real + t.imag * t.imag)
        if nrm2 < 1.0 and h > 0.0:
            out[k] = log(h)
        else:
            out[k] = NAN
    return out

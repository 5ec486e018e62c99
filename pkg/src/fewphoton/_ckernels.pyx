# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_pykernels`` for the reference implementation."""

import numpy as np
cimport numpy as cnp
from libc.math cimport lgamma, exp

cnp.import_array()


cdef inline double _binom(int n, int k) nogil:
    return exp(lgamma(n + 1.0) - lgamma(k + 1.0) - lgamma(n - k + 1.0))


cdef inline double complex _ipow(double complex z, int k) nogil:
    cdef double complex r = 1.0
    cdef int i
    for i in range(k):
        r = r * z
    return r


def two_mode_amplitudes(int n, int m, double complex u00, double complex u01,
                        double complex u10, double complex u11):
    cdef int total = n + m
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(total + 1, dtype=np.complex128)
    cdef int p, q, k
    cdef double complex term
    cdef double norm
    for p in range(n + 1):
        for q in range(m + 1):
            term = _binom(n, p) * _binom(m, q)
            term = term * _ipow(u00, p) * _ipow(u10, n - p) * _ipow(u01, q) * _ipow(u11, m - q)
            out[p + q] += term
    for k in range(total + 1):
        norm = exp(0.5 * (lgamma(k + 1.0) + lgamma(total - k + 1.0)
                          - lgamma(n + 1.0) - lgamma(m + 1.0)))
        out[k] *= norm
    return out


def permanent(matrix):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] a = np.ascontiguousarray(matrix, dtype=np.complex128)
    cdef Py_ssize_t n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("permanent needs a square matrix")
    if n == 0:
        return 1.0 + 0.0j
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] row_comb = np.zeros(n, dtype=np.complex128)
    cdef Py_ssize_t i, j, k
    cdef double complex prod, total = 0.0
    cdef double sign = 1.0
    cdef long long code, prev = 0, gray, flip, n_iter
    cdef int bit
    # Glynn formula with Gray-code ordering of the sign vector; delta_0 fixed to +1.
    for j in range(n):
        for i in range(n):
            row_comb[j] += a[i, j]
    prod = 1.0
    for j in range(n):
        prod *= row_comb[j]
    total = prod
    n_iter = 1LL << (n - 1)
    for code in range(1, n_iter):
        gray = code ^ (code >> 1)
        flip = gray ^ prev
        bit = 0
        while (flip >> bit) != 1:
            bit += 1
        i = bit + 1
        if gray & flip:
            for j in range(n):
                row_comb[j] -= 2.0 * a[i, j]
        else:
            for j in range(n):
                row_comb[j] += 2.0 * a[i, j]
        sign = -sign
        prod = 1.0
        for j in range(n):
            prod *= row_comb[j]
        total += sign * prod
        prev = gray
    return total / n_iter

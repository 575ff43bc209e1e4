# Compiled counterpart of _ref.py; one fused pass per grid point.

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, sin

cnp.import_array()

BACKEND = "cython"

cdef double LOG_FLOOR = -700.0


cdef inline double _hermite_one(int n, double xi) noexcept nogil:
    cdef double h_prev, h, h_next
    cdef int k
    if n == 0:
        return 1.0
    h_prev = 1.0
    h = 2.0 * xi
    for k in range(1, n):
        h_next = 2.0 * xi * h - (2.0 * k) * h_prev
        h_prev = h
        h = h_next
    return h


def hermite_values(int n, xi):
    """Physicists' Hermite polynomial H_n at the points xi (recurrence)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xi_arr = np.ascontiguousarray(
        np.atleast_1d(np.asarray(xi, dtype=np.float64)).ravel()
    )
    cdef Py_ssize_t m = xi_arr.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            out[i] = _hermite_one(n, xi_arr[i])
    shaped = np.asarray(xi, dtype=np.float64)
    return out.reshape(np.shape(shaped))


def state_kernel(x, int n, double log_norm, double gauss_re, double gauss_im,
                 double scale, double x_shift, double k_lin, double phase0):
    """Eigenstate samples on a grid; same contract as the numpy fallback."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x_arr = np.ascontiguousarray(
        np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel()
    )
    cdef Py_ssize_t m = x_arr.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(m, dtype=np.complex128)
    cdef Py_ssize_t i
    cdef double d, log_amp, amp, arg
    with nogil:
        for i in range(m):
            d = x_arr[i] - x_shift
            log_amp = log_norm + gauss_re * d * d
            if log_amp > LOG_FLOOR:
                amp = exp(log_amp) * _hermite_one(n, scale * d)
                arg = gauss_im * d * d + k_lin * x_arr[i] + phase0
                out[i].real = amp * cos(arg)
                out[i].imag = amp * sin(arg)
    shaped = np.asarray(x, dtype=np.float64)
    return out.reshape(np.shape(shaped))

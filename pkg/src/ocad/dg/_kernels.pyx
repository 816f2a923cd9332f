# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels for the DG solver.

Mirrors ``_kernels_py``; the wins come from fusing the evaluate-and-reduce
loops so no (rows, npts) temporaries are materialized.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def eval_points(double[:, ::1] coeffs, double[:, ::1] table):
    cdef Py_ssize_t rows = coeffs.shape[0]
    cdef Py_ssize_t nm = coeffs.shape[1]
    cdef Py_ssize_t npts = table.shape[1]
    out_arr = np.empty((rows, npts))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t r, p, m
    cdef double acc
    with nogil:
        for r in range(rows):
            for p in range(npts):
                acc = 0.0
                for m in range(nm):
                    acc += coeffs[r, m] * table[m, p]
                out[r, p] = acc
    return out_arr


def eval_minmax(double[:, ::1] coeffs, double[:, ::1] table):
    cdef Py_ssize_t rows = coeffs.shape[0]
    cdef Py_ssize_t nm = coeffs.shape[1]
    cdef Py_ssize_t npts = table.shape[1]
    lo_arr = np.empty(rows)
    hi_arr = np.empty(rows)
    cdef double[::1] lo = lo_arr
    cdef double[::1] hi = hi_arr
    cdef Py_ssize_t r, p, m
    cdef double acc, vmin, vmax
    with nogil:
        for r in range(rows):
            vmin = 1e300
            vmax = -1e300
            for p in range(npts):
                acc = 0.0
                for m in range(nm):
                    acc += coeffs[r, m] * table[m, p]
                if acc < vmin:
                    vmin = acc
                if acc > vmax:
                    vmax = acc
            lo[r] = vmin
            hi[r] = vmax
    return lo_arr, hi_arr


def scale_about_mean(double[:, ::1] coeffs, double[::1] delta):
    cdef Py_ssize_t rows = coeffs.shape[0]
    cdef Py_ssize_t nm = coeffs.shape[1]
    out_arr = np.empty((rows, nm))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t r, m
    cdef double d
    with nogil:
        for r in range(rows):
            out[r, 0] = coeffs[r, 0]
            d = delta[r]
            for m in range(1, nm):
                out[r, m] = coeffs[r, m] * d
    return out_arr


def lf_flux(uL, uR, fL, fR, double alpha):
    shape = uL.shape
    out_arr = np.empty(shape)
    cdef double[::1] out = out_arr.reshape(-1)
    cdef double[::1] a = np.ascontiguousarray(uL).reshape(-1)
    cdef double[::1] b = np.ascontiguousarray(uR).reshape(-1)
    cdef double[::1] fa = np.ascontiguousarray(fL).reshape(-1)
    cdef double[::1] fb = np.ascontiguousarray(fR).reshape(-1)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            out[i] = 0.5 * (fa[i] + fb[i]) - 0.5 * alpha * (b[i] - a[i])
    return out_arr

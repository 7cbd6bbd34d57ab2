# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled interpolation kernels (bilinear 2D and linear 1D gathers)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef fused field_t:
    double
    double complex


def bilinear_gather_flat(field_t[:, ::1] values, double x0, double dx,
                         double y0, double dy,
                         const double[::1] xq, const double[::1] yq):
    cdef Py_ssize_t m = xq.shape[0]
    cdef Py_ssize_t nx = values.shape[0]
    cdef Py_ssize_t ny = values.shape[1]
    if field_t is double:
        out_np = np.zeros(m, dtype=np.float64)
    else:
        out_np = np.zeros(m, dtype=np.complex128)
    cdef field_t[::1] out = out_np
    cdef Py_ssize_t k, i0, j0
    cdef double u, v, tx, ty
    for k in range(m):
        u = (xq[k] - x0) / dx
        v = (yq[k] - y0) / dy
        if u < 0.0 or u > nx - 1 or v < 0.0 or v > ny - 1:
            continue
        i0 = <Py_ssize_t>u
        if i0 > nx - 2:
            i0 = nx - 2
        j0 = <Py_ssize_t>v
        if j0 > ny - 2:
            j0 = ny - 2
        tx = u - i0
        ty = v - j0
        out[k] = ((1.0 - tx) * (1.0 - ty) * values[i0, j0]
                  + tx * (1.0 - ty) * values[i0 + 1, j0]
                  + (1.0 - tx) * ty * values[i0, j0 + 1]
                  + tx * ty * values[i0 + 1, j0 + 1])
    return out_np


def linear_gather_flat(field_t[::1] values, double x0, double dx,
                       const double[::1] xq):
    cdef Py_ssize_t m = xq.shape[0]
    cdef Py_ssize_t n = values.shape[0]
    if field_t is double:
        out_np = np.zeros(m, dtype=np.float64)
    else:
        out_np = np.zeros(m, dtype=np.complex128)
    cdef field_t[::1] out = out_np
    cdef Py_ssize_t k, i0
    cdef double u, t
    for k in range(m):
        u = (xq[k] - x0) / dx
        if u < 0.0 or u > n - 1:
            continue
        i0 = <Py_ssize_t>u
        if i0 > n - 2:
            i0 = n - 2
        t = u - i0
        out[k] = (1.0 - t) * values[i0] + t * values[i0 + 1]
    return out_np

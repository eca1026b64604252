# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics match ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx


def horner_batch(coeffs, zs):
    cdef const cplx[:, :, ::1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef const cplx[::1] z = np.ascontiguousarray(zs, dtype=np.complex128)
    cdef Py_ssize_t deg = c.shape[0], p = c.shape[1], r = c.shape[2]
    cdef Py_ssize_t npts = z.shape[0]
    out_arr = np.zeros((npts, p, r), dtype=np.complex128)
    cdef cplx[:, :, ::1] out = out_arr
    cdef Py_ssize_t i, k, a, b
    cdef cplx zi, acc
    for i in range(npts):
        zi = z[i]
        for a in range(p):
            for b in range(r):
                acc = 0
                for k in range(deg - 1, -1, -1):
                    acc = acc * zi + c[k, a, b]
                out[i, a, b] = acc
    return out_arr


def sandwich_coeffs(row, col):
    cdef const cplx[:, :, ::1] rw = np.ascontiguousarray(row, dtype=np.complex128)
    cdef const cplx[:, :, ::1] cl = np.ascontiguousarray(col, dtype=np.complex128)
    cdef Py_ssize_t n = rw.shape[0], p = rw.shape[1], q = rw.shape[2], r = cl.shape[2]
    if cl.shape[0] != n or cl.shape[1] != q:
        raise ValueError("row/col block shapes do not conform")
    out_arr = np.zeros((n, p, r), dtype=np.complex128)
    cdef cplx[:, :, ::1] out = out_arr
    cdef Py_ssize_t d, k, a, b, t
    cdef cplx acc
    for d in range(n):
        for a in range(p):
            for b in range(r):
                acc = 0
                for k in range(d, n):
                    for t in range(q):
                        acc = acc + rw[k, a, t] * cl[k - d, t, b]
                out[d, a, b] = acc
    return out_arr


def hankel_dense(s, Py_ssize_t rows, Py_ssize_t cols, Py_ssize_t shift):
    cdef const cplx[:, :, ::1] sv = np.ascontiguousarray(s, dtype=np.complex128)
    cdef Py_ssize_t q = sv.shape[1]
    if rows + cols - 2 + shift >= sv.shape[0]:
        raise IndexError("not enough moments for the requested layout")
    out_arr = np.empty((rows * q, cols * q), dtype=np.complex128)
    cdef cplx[:, ::1] out = out_arr
    cdef Py_ssize_t k, l, a, b
    for k in range(rows):
        for l in range(cols):
            for a in range(q):
                for b in range(q):
                    out[k * q + a, l * q + b] = sv[k + l + shift, a, b]
    return out_arr

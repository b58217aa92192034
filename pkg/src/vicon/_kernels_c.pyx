# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled evaluation kernels (Cython backend).

Mirrors ``_kernels_np`` exactly: same entry points, same summation order,
so the two backends agree to floating-point roundoff.
"""

import numpy as np

cimport cython
from libc.math cimport exp

from .errors import DegenerateResponseError

NAME = "compiled"


cdef inline double _sigmoid(double z) nogil:
    cdef double ez
    if z >= 0.0:
        return 1.0 / (1.0 + exp(-z))
    ez = exp(z)
    return ez / (1.0 + ez)


cdef void _raw(const double[::1] w, const double[::1] b,
               const long[::1] rf_idx, const long[::1] rf_ptr,
               const double[::1] x, double[::1] q) nogil:
    cdef Py_ssize_t y, k
    cdef double z
    for y in range(b.shape[0]):
        z = b[y]
        for k in range(rf_ptr[y], rf_ptr[y + 1]):
            z += w[k] * x[rf_idx[k]]
        q[y] = _sigmoid(z)


cdef void _spmv_binary(const long[::1] idx, const long[::1] ptr,
                       const double[::1] v, double[::1] out) nogil:
    cdef Py_ssize_t y, k
    cdef double acc
    for y in range(out.shape[0]):
        acc = 0.0
        for k in range(ptr[y], ptr[y + 1]):
            acc += v[idx[k]]
        out[y] = acc


cdef void _spmv(const long[::1] idx, const long[::1] ptr, const double[::1] data,
                const double[::1] v, double[::1] out) nogil:
    cdef Py_ssize_t y, k
    cdef double acc
    for y in range(out.shape[0]):
        acc = 0.0
        for k in range(ptr[y], ptr[y + 1]):
            acc += data[k] * v[idx[k]]
        out[y] = acc


def posterior_pass(topo, weights, biases, x):
    """See ``vicon._kernels_np.posterior_pass``."""
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(biases, dtype=np.float64)
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef long[::1] rf_idx = topo.rf_indices
    cdef long[::1] rf_ptr = topo.rf_indptr
    cdef long[::1] n_idx = topo.n_indices
    cdef long[::1] n_ptr = topo.n_indptr
    cdef long[::1] nt_idx = topo.ninv_indices
    cdef long[::1] nt_ptr = topo.ninv_indptr
    cdef long[::1] lt_idx = topo.lt_indices
    cdef long[::1] lt_ptr = topo.lt_indptr
    cdef double[::1] lt_dat = topo.lt_data

    cdef Py_ssize_t m = b.shape[0]
    q_arr = np.empty(m)
    s_arr = np.empty(m)
    r_arr = np.empty(m)
    p_arr = np.empty(m)
    ltp_arr = np.empty(m)
    cdef double[::1] q = q_arr
    cdef double[::1] s = s_arr
    cdef double[::1] r = r_arr
    cdef double[::1] p = p_arr
    cdef double[::1] ltp = ltp_arr
    inv_arr = np.empty(m)
    cdef double[::1] inv = inv_arr
    cdef Py_ssize_t y
    cdef bint degenerate = 0

    with nogil:
        _raw(w, b, rf_idx, rf_ptr, xv, q)
        _spmv_binary(n_idx, n_ptr, q, s)
        for y in range(m):
            if s[y] <= 0.0:
                degenerate = 1
                break
        if not degenerate:
            for y in range(m):
                inv[y] = 1.0 / s[y]
            _spmv_binary(nt_idx, nt_ptr, inv, r)
            for y in range(m):
                p[y] = q[y] * r[y]
            _spmv(lt_idx, lt_ptr, lt_dat, p, ltp)
    if degenerate:
        raise DegenerateResponseError(
            "raw responses underflowed: a neighbourhood sum is zero"
        )
    return q_arr, s_arr, r_arr, p_arr, ltp_arr


def gradient_pass(topo, weights, biases, references, x):
    """See ``vicon._kernels_np.gradient_pass``."""
    q_arr, s_arr, r_arr, p_arr, ltp_arr = posterior_pass(topo, weights, biases, x)

    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] refs = np.ascontiguousarray(references, dtype=np.float64)
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef long[::1] rf_idx = topo.rf_indices
    cdef long[::1] rf_ptr = topo.rf_indptr
    cdef long[::1] n_idx = topo.n_indices
    cdef long[::1] n_ptr = topo.n_indptr
    cdef long[::1] nt_idx = topo.ninv_indices
    cdef long[::1] nt_ptr = topo.ninv_indptr
    cdef long[::1] l_idx = topo.l_indices
    cdef long[::1] l_ptr = topo.l_indptr
    cdef double[::1] l_dat = topo.l_data

    cdef double[::1] q = q_arr
    cdef double[::1] s = s_arr
    cdef double[::1] p = p_arr
    cdef double[::1] ltp = ltp_arr

    cdef Py_ssize_t m = q.shape[0]
    cdef Py_ssize_t nrf = rf_idx.shape[0]
    e_arr = np.empty(m)
    le_arr = np.empty(m)
    qle_arr = np.empty(m)
    ple_arr = np.empty(m)
    ples_arr = np.empty(m)
    ptple_arr = np.empty(m)
    gb_arr = np.empty(m)
    gw_arr = np.empty(nrf)
    gx_arr = np.empty(nrf)
    cdef double[::1] e = e_arr
    cdef double[::1] le = le_arr
    cdef double[::1] qle = qle_arr
    cdef double[::1] ple = ple_arr
    cdef double[::1] ples = ples_arr
    cdef double[::1] ptple = ptple_arr
    cdef double[::1] gb = gb_arr
    cdef double[::1] gw = gw_arr
    cdef double[::1] gx = gx_arr

    cdef Py_ssize_t y, k
    cdef double acc, xsq, objective, two_over_m, four_over_m

    with nogil:
        two_over_m = 2.0 / m
        four_over_m = 4.0 / m
        xsq = 0.0
        for k in range(xv.shape[0]):
            xsq += xv[k] * xv[k]
        for y in range(m):
            acc = 0.0
            for k in range(rf_ptr[y], rf_ptr[y + 1]):
                acc += refs[k] * (refs[k] - 2.0 * xv[rf_idx[k]])
            e[y] = acc
        objective = 0.0
        for y in range(m):
            objective += ltp[y] * (e[y] + xsq)
        objective *= two_over_m

        _spmv(l_idx, l_ptr, l_dat, e, le)
        for y in range(m):
            qle[y] = q[y] * le[y]
        _spmv_binary(n_idx, n_ptr, qle, ple)
        for y in range(m):
            ple[y] /= s[y]
            ples[y] = ple[y] / s[y]
        _spmv_binary(nt_idx, nt_ptr, ples, ptple)
        for y in range(m):
            ptple[y] *= q[y]
            gb[y] = two_over_m * (p[y] * le[y] - ptple[y]) * (1.0 - q[y])
        for y in range(m):
            for k in range(rf_ptr[y], rf_ptr[y + 1]):
                gw[k] = gb[y] * xv[rf_idx[k]]
                gx[k] = -four_over_m * ltp[y] * (xv[rf_idx[k]] - refs[k])

    return float(objective), gw_arr, gb_arr, gx_arr, q_arr, s_arr, r_arr, p_arr, ltp_arr, e_arr

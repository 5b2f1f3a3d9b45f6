# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.  Semantics match _ref.py; tests compare the two backends.

Pair sums use a monotone merge over the sorted keys instead of per-point
binary search, and all accumulators are Kahan-compensated, which leaves
integer-valued sums exact.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, cos, floor, sin

cnp.import_array()


def pair_sums(keys, weights, deltas):
    keys = np.ascontiguousarray(keys, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    deltas = np.ascontiguousarray(deltas, dtype=np.int64)
    cdef const cnp.int64_t[::1] kv = keys
    cdef const double complex[::1] wv = weights
    cdef const cnp.int64_t[::1] dv = deltas
    cdef Py_ssize_t N = kv.shape[0]
    cdef Py_ssize_t M = dv.shape[0]
    out_re = np.zeros(M, dtype=np.float64)
    out_im = np.zeros(M, dtype=np.float64)
    counts = np.zeros(M, dtype=np.int64)
    cdef double[::1] rv = out_re
    cdef double[::1] iv = out_im
    cdef cnp.int64_t[::1] cv = counts
    cdef Py_ssize_t a, i, j
    cdef cnp.int64_t target, d
    cdef double sre, sim, cre, cim, yre, yim, tre, tim
    cdef double wire, wiim, wjre, wjim
    if N == 0:
        return out_re + 1j * out_im, counts
    with nogil:
        for a in range(M):
            d = dv[a]
            sre = 0.0
            sim = 0.0
            cre = 0.0
            cim = 0.0
            j = 0
            for i in range(N):
                target = kv[i] - d
                while j < N and kv[j] < target:
                    j += 1
                if j == N:
                    break
                if kv[j] == target:
                    cv[a] += 1
                    wire = wv[i].real
                    wiim = wv[i].imag
                    wjre = wv[j].real
                    wjim = wv[j].imag
                    yre = (wire * wjre + wiim * wjim) - cre
                    tre = sre + yre
                    cre = (tre - sre) - yre
                    sre = tre
                    yim = (wiim * wjre - wire * wjim) - cim
                    tim = sim + yim
                    cim = (tim - sim) - yim
                    sim = tim
            rv[a] = sre
            iv[a] = sim
    return out_re + 1j * out_im, counts


def expsum_int_batch(coords, weights, C):
    coords_f = np.ascontiguousarray(coords, dtype=np.float64)
    if coords_f.ndim == 1:
        coords_f = coords_f.reshape(-1, 1)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    C2 = np.ascontiguousarray(np.atleast_2d(C), dtype=np.float64)
    return _expsum(coords_f, weights, C2)


def expsum_float_batch(pos, weights, K):
    pos = np.ascontiguousarray(np.atleast_2d(pos), dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    K2 = np.ascontiguousarray(np.atleast_2d(K), dtype=np.float64)
    return _expsum(pos, weights, K2)


def _expsum(const double[:, ::1] xv, const double complex[::1] wv, const double[:, ::1] cv2):
    cdef Py_ssize_t N = xv.shape[0]
    cdef Py_ssize_t D = xv.shape[1]
    cdef Py_ssize_t M = cv2.shape[0]
    out_re = np.zeros(M, dtype=np.float64)
    out_im = np.zeros(M, dtype=np.float64)
    cdef double[::1] rv = out_re
    cdef double[::1] iv = out_im
    cdef Py_ssize_t a, i, dd
    cdef double t, theta, ang, cc, ss, wre, wim
    cdef double sre, sim, cre, cim, yre, yim, tre, tim
    with nogil:
        for a in range(M):
            sre = 0.0
            sim = 0.0
            cre = 0.0
            cim = 0.0
            for i in range(N):
                t = 0.0
                for dd in range(D):
                    t += xv[i, dd] * cv2[a, dd]
                theta = t - floor(t)
                ang = -2.0 * M_PI * theta
                cc = cos(ang)
                ss = sin(ang)
                wre = wv[i].real
                wim = wv[i].imag
                yre = (wre * cc - wim * ss) - cre
                tre = sre + yre
                cre = (tre - sre) - yre
                sre = tre
                yim = (wre * ss + wim * cc) - cim
                tim = sim + yim
                cim = (tim - sim) - yim
                sim = tim
            rv[a] = sre
            iv[a] = sim
    return out_re + 1j * out_im

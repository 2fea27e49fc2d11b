# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled observation-sweep kernel.

Same contract as entpow._kernels_np.moment_sweep, written as a single
fused loop so the per-point (K, n) intermediates stay in registers/L1.
"""

import numpy as np

from libc.math cimport exp, log

BACKEND_NAME = "cython"


def moment_sweep(object atoms_in, object means_in, object log_probs_in,
                 object inv_cov_in, double log_norm,
                 object points_in, object weights_in):
    cdef const double[:, ::1] atoms = np.ascontiguousarray(atoms_in, dtype=np.float64)
    cdef const double[:, ::1] means = np.ascontiguousarray(means_in, dtype=np.float64)
    cdef const double[::1] log_probs = np.ascontiguousarray(log_probs_in, dtype=np.float64)
    cdef const double[::1] inv_cov = np.ascontiguousarray(inv_cov_in, dtype=np.float64)
    cdef const double[:, ::1] points = np.ascontiguousarray(points_in, dtype=np.float64)
    cdef const double[::1] weights = np.ascontiguousarray(weights_in, dtype=np.float64)

    cdef Py_ssize_t K = atoms.shape[0]
    cdef Py_ssize_t n = atoms.shape[1]
    cdef Py_ssize_t M = points.shape[0]

    q_arr = np.empty(K, dtype=np.float64)
    r_arr = np.empty(K, dtype=np.float64)
    m1_arr = np.empty(n, dtype=np.float64)
    phi1_out = np.zeros((n, n), dtype=np.float64)
    phi2_out = np.zeros((n, n), dtype=np.float64)
    phi4_out = np.zeros((n, n), dtype=np.float64)

    cdef double[::1] q = q_arr
    cdef double[::1] r = r_arr
    cdef double[::1] m1 = m1_arr
    cdef double[:, ::1] phi1 = phi1_out
    cdef double[:, ::1] phi2 = phi2_out
    cdef double[:, ::1] phi4 = phi4_out

    cdef double w_sum = 0.0, h1 = 0.0, h2 = 0.0
    cdef double qmax, ssum, logf, w, acc, dd, m2ij, phi_ij, phi_sq, wphi_sq
    cdef Py_ssize_t m, k, i, j

    with nogil:
        for m in range(M):
            w = weights[m]
            qmax = -1e308
            for k in range(K):
                acc = 0.0
                for i in range(n):
                    dd = points[m, i] - means[k, i]
                    acc += inv_cov[i] * dd * dd
                q[k] = log_probs[k] + log_norm - 0.5 * acc
                if q[k] > qmax:
                    qmax = q[k]
            ssum = 0.0
            for k in range(K):
                r[k] = exp(q[k] - qmax)
                ssum += r[k]
            logf = qmax + log(ssum)
            for k in range(K):
                r[k] /= ssum

            w_sum += w
            h1 += w * logf
            h2 += w * logf * logf

            for i in range(n):
                acc = 0.0
                for k in range(K):
                    acc += r[k] * atoms[k, i]
                m1[i] = acc
            for i in range(n):
                for j in range(i, n):
                    m2ij = 0.0
                    for k in range(K):
                        m2ij += r[k] * atoms[k, i] * atoms[k, j]
                    phi_ij = m2ij - m1[i] * m1[j]
                    phi_sq = phi_ij * phi_ij
                    wphi_sq = w * phi_sq
                    phi1[i, j] += w * phi_ij
                    phi2[i, j] += wphi_sq
                    phi4[i, j] += wphi_sq * phi_sq

    # mirror the upper triangle (the loop filled j >= i only)
    for i in range(n):
        for j in range(i):
            phi1_out[i, j] = phi1_out[j, i]
            phi2_out[i, j] = phi2_out[j, i]
            phi4_out[i, j] = phi4_out[j, i]

    return w_sum, h1, h2, phi1_out, phi2_out, phi4_out

# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled Monte Carlo hot-loop kernels.

Mirrors ofdm_im._kernels_py function for function.  Counting and
scatter-add kernels accumulate in flat input order so their results are
bit-identical to the numpy fallback; the EM pass reduces sequentially,
which agrees with numpy's pairwise reductions to ~1e-10 relative.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log

cnp.import_array()


def detect_confusion(double[:, ::1] y_re, double[:, ::1] y_im,
                     cnp.int64_t[::1] true_idx, int nf):
    """Count index detection outcomes for a block of trials.

    See the fallback docstring for the contract; argmax takes the first
    maximum on ties, matching np.argmax.
    """
    cdef Py_ssize_t n = y_re.shape[0]
    cdef Py_ssize_t m = y_re.shape[1]
    out = np.zeros((nf, nf), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] counts = out
    cdef Py_ssize_t t, j, best
    cdef double e, e_best
    with nogil:
        for t in range(n):
            best = 0
            e_best = y_re[t, 0] * y_re[t, 0] + y_im[t, 0] * y_im[t, 0]
            for j in range(1, m):
                e = y_re[t, j] * y_re[t, j] + y_im[t, j] * y_im[t, j]
                if e > e_best:
                    e_best = e
                    best = j
            counts[true_idx[t], best] += 1
    return out


def segment_sum(double[::1] values, cnp.int64_t[::1] seg_ids,
                Py_ssize_t n_segments):
    """Scatter-add values into n_segments bins, in input order."""
    out = np.zeros(n_segments, dtype=np.float64)
    cdef double[::1] acc = out
    cdef Py_ssize_t i, n = values.shape[0]
    with nogil:
        for i in range(n):
            acc[seg_ids[i]] += values[i]
    return out


def ici_accumulate(double[:, ::1] active, double[:, ::1] h_re,
                   double[:, ::1] h_im, double[:, ::1] x_re,
                   double[:, ::1] x_im, double[::1] amps):
    """Sum per-trial complex interference over a fixed interferer set."""
    cdef Py_ssize_t n = active.shape[0]
    cdef Py_ssize_t m = active.shape[1]
    out_re = np.zeros(n, dtype=np.float64)
    out_im = np.zeros(n, dtype=np.float64)
    cdef double[::1] acc_re = out_re
    cdef double[::1] acc_im = out_im
    cdef Py_ssize_t t, j
    cdef double s_re, s_im
    with nogil:
        for t in range(n):
            s_re = 0.0
            s_im = 0.0
            for j in range(m):
                # same operation order as the fallback: (h*x) * amp * active
                s_re += (h_re[t, j] * x_re[t, j] - h_im[t, j] * x_im[t, j]) \
                    * amps[j] * active[t, j]
                s_im += (h_re[t, j] * x_im[t, j] + h_im[t, j] * x_re[t, j]) \
                    * amps[j] * active[t, j]
            acc_re[t] = s_re
            acc_im[t] = s_im
    return out_re, out_im


def em_pass(double[::1] u, double[::1] omegas, double[::1] sigmas2):
    """One EM iteration for a zero-mean complex Gaussian mixture.

    Same contract as the fallback: log-domain responsibilities over the
    squared magnitudes u, returns (new weights, new variances, loglik of
    the current parameters up to -n*log(pi), in nats).
    """
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t q = omegas.shape[0]
    log_w_arr = np.empty(q, dtype=np.float64)
    logr_arr = np.empty(q, dtype=np.float64)
    scaled_arr = np.empty(q, dtype=np.float64)
    mass_arr = np.zeros(q, dtype=np.float64)
    wu_arr = np.zeros(q, dtype=np.float64)
    new_w = np.empty(q, dtype=np.float64)
    new_s2 = np.empty(q, dtype=np.float64)
    cdef double[::1] log_w = log_w_arr
    cdef double[::1] logr = logr_arr
    cdef double[::1] scaled = scaled_arr
    cdef double[::1] mass = mass_arr
    cdef double[::1] wu = wu_arr
    cdef double[::1] out_w = new_w
    cdef double[::1] out_s2 = new_s2
    cdef Py_ssize_t t, k
    cdef double peak, norm, r, loglik = 0.0
    cdef double neg_inf = -np.inf
    with nogil:
        for k in range(q):
            if omegas[k] > 0.0:
                log_w[k] = log(omegas[k]) - log(sigmas2[k])
            else:
                log_w[k] = neg_inf
        for t in range(n):
            peak = neg_inf
            for k in range(q):
                logr[k] = log_w[k] - u[t] / sigmas2[k]
                if logr[k] > peak:
                    peak = logr[k]
            norm = 0.0
            for k in range(q):
                scaled[k] = exp(logr[k] - peak)
                norm += scaled[k]
            loglik += peak + log(norm)
            for k in range(q):
                r = scaled[k] / norm
                mass[k] += r
                wu[k] += r * u[t]
        for k in range(q):
            out_w[k] = mass[k] / n
            if mass[k] > 0.0:
                out_s2[k] = wu[k] / mass[k]
            else:
                out_s2[k] = sigmas2[k]
    return new_w, new_s2, loglik

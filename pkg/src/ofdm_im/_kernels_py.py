"""Pure numpy implementations of the Monte Carlo hot-loop kernels.

This module is the reference semantics for the compiled extension; the
package works identically (if slower) when the extension is absent.

Accumulation-order contract: counting kernels and scatter-add sums process
elements in flat input order (row-major), which is what ``np.bincount`` and
``np.argmax`` do internally, so the compiled mirrors can reproduce their
results bit for bit.  The EM pass uses whole-array reductions whose
summation order differs between numpy (pairwise) and a plain loop, so
cross-backend agreement there is to ~1e-10 relative, not bitwise.
"""
from __future__ import annotations

import numpy as np


def detect_confusion(y_re: np.ndarray, y_im: np.ndarray, true_idx: np.ndarray,
                     nf: int) -> np.ndarray:
    """Count index detection outcomes for a block of trials.

    ``y_re``/``y_im`` are (n, nf) received amplitudes per subcarrier;
    ``true_idx`` is the (n,) transmitted index.  The detector picks the
    subcarrier with the largest power (first maximum on ties).  Returns an
    (nf, nf) int64 matrix: entry (i, j) counts trials sent on i, detected j.
    """
    energies = y_re * y_re + y_im * y_im
    detected = np.argmax(energies, axis=1)
    flat = true_idx * np.int64(nf) + detected
    counts = np.bincount(flat, minlength=nf * nf)
    return counts.reshape(nf, nf).astype(np.int64)


def segment_sum(values: np.ndarray, seg_ids: np.ndarray,
                n_segments: int) -> np.ndarray:
    """Scatter-add ``values`` into ``n_segments`` bins keyed by ``seg_ids``.

    Accumulates in input order; segments may appear in any order and may be
    empty (their sum is 0).
    """
    return np.bincount(seg_ids, weights=values, minlength=n_segments)


def ici_accumulate(active: np.ndarray, h_re: np.ndarray, h_im: np.ndarray,
                   x_re: np.ndarray, x_im: np.ndarray,
                   amps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sum per-trial complex interference over a fixed interferer set.

    All (n, m) inputs are float64: ``active`` holds 0.0/1.0 collision
    indicators, ``h`` the channel, ``x`` the symbol; ``amps`` is the (m,)
    per-interferer amplitude (sqrt of received power).  Returns the (n,)
    real and imaginary parts of sum_j active * amps_j * h * x, accumulated
    in ascending j per trial.
    """
    n, m = active.shape
    c_re = (h_re * x_re - h_im * x_im) * amps * active
    c_im = (h_re * x_im + h_im * x_re) * amps * active
    seg = np.repeat(np.arange(n, dtype=np.int64), m)
    out_re = np.bincount(seg, weights=c_re.ravel(), minlength=n)
    out_im = np.bincount(seg, weights=c_im.ravel(), minlength=n)
    return out_re, out_im


def em_pass(u: np.ndarray, omegas: np.ndarray,
            sigmas2: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """One EM iteration for a zero-mean complex Gaussian mixture.

    ``u`` is the (n,) array of squared magnitudes |tau|^2 (a sufficient
    statistic: every mixture component is circularly symmetric), ``omegas``
    and ``sigmas2`` the current (q,) weights and total complex variances.
    Returns updated weights, updated variances, and the log-likelihood of
    the CURRENT parameters up to the additive constant -n*log(pi) (nats).

    Responsibilities are formed in the log domain.  A component whose
    responsibility mass underflows to zero keeps its old variance and gets
    weight zero (the caller decides whether to prune).
    """
    n = u.shape[0]
    with np.errstate(divide="ignore"):
        log_w = np.log(omegas) - np.log(sigmas2)
    logr = log_w[np.newaxis, :] - u[:, np.newaxis] / sigmas2[np.newaxis, :]
    peak = np.max(logr, axis=1)
    scaled = np.exp(logr - peak[:, np.newaxis])
    norm = np.sum(scaled, axis=1)
    loglik = float(np.sum(peak + np.log(norm)))
    resp = scaled / norm[:, np.newaxis]
    mass = np.sum(resp, axis=0)
    weighted_u = np.sum(resp * u[:, np.newaxis], axis=0)
    new_omegas = mass / n
    safe = np.where(mass > 0.0, mass, 1.0)
    new_sigmas2 = np.where(mass > 0.0, weighted_u / safe, sigmas2)
    return new_omegas, new_sigmas2, loglik

"""Pure-numpy reference implementation of the observation-sweep kernel.

Chunked so that the (batch, K, n) intermediates stay cache-friendly; the
reduction order is fixed (chunks in ascending order), which keeps results
bit-stable for a given input.
"""

import numpy as np

BACKEND_NAME = "numpy"

_CHUNK = 8192


def moment_sweep(atoms, means, log_probs, inv_cov, log_norm, points, weights):
    """Accumulate weighted sums of log-density and posterior-moment terms.

    Per point y with weight w, using component log-densities
    q_k = log_probs[k] + log_norm - 0.5 * sum_i inv_cov[i] * (y_i - means[k,i])^2:

      logf  = logsumexp(q)
      r_k   = exp(q_k - logf)                  (responsibilities)
      m1    = sum_k r_k * atoms[k]             (posterior mean of the atoms)
      phi   = sum_k r_k * atoms[k] atoms[k]^T - m1 m1^T

    Returns raw sums (w_sum, h1, h2, phi1, phi2, phi4) where
    h1 = sum w*logf, h2 = sum w*logf^2, phi1 = sum w*phi,
    phi2 = sum w*(phi∘phi), phi4 = sum w*(phi∘phi)∘(phi∘phi).
    """
    atoms = np.asarray(atoms, dtype=float)
    means = np.asarray(means, dtype=float)
    log_probs = np.asarray(log_probs, dtype=float)
    inv_cov = np.asarray(inv_cov, dtype=float)
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)

    n = atoms.shape[1]
    w_sum = 0.0
    h1 = 0.0
    h2 = 0.0
    phi1 = np.zeros((n, n))
    phi2 = np.zeros((n, n))
    phi4 = np.zeros((n, n))

    for start in range(0, points.shape[0], _CHUNK):
        y = points[start : start + _CHUNK]
        w = weights[start : start + _CHUNK]

        d = y[:, None, :] - means[None, :, :]
        q = log_probs[None, :] + log_norm - 0.5 * np.einsum("mkn,n->mk", d * d, inv_cov)
        qmax = q.max(axis=1)
        ex = np.exp(q - qmax[:, None])
        s = ex.sum(axis=1)
        logf = qmax + np.log(s)
        r = ex / s[:, None]

        m1 = r @ atoms
        m2 = np.einsum("mk,ki,kj->mij", r, atoms, atoms)
        phi = m2 - m1[:, None, :] * m1[:, :, None]
        phi_sq = phi * phi

        w_sum += float(w.sum())
        h1 += float(w @ logf)
        h2 += float(w @ (logf * logf))
        phi1 += np.einsum("m,mij->ij", w, phi)
        phi2 += np.einsum("m,mij->ij", w, phi_sq)
        phi4 += np.einsum("m,mij->ij", w, phi_sq * phi_sq)

    return w_sum, h1, h2, phi1, phi2, phi4

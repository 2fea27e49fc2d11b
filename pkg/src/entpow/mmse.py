"""Posterior moments of the signal given an observation, and the
observation-averaged minimum mean-square-error matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import _mixture_of
from .integrate import IntegratorConfig, mixture_moments

PSD_RTOL = 1e-10  # relative eigenvalue tolerance for exact finite sums


@dataclass(frozen=True)
class ConditionalMoments:
    """Exact posterior moments of the signal atoms at one observation.

    phi is the posterior covariance (the per-observation error matrix of
    the conditional-mean estimator); it is positive semidefinite by
    construction, up to floating-point roundoff.
    """

    responsibilities: np.ndarray  # (K,)
    cond_mean: np.ndarray  # (n,)
    cond_second_moment: np.ndarray  # (n, n)
    phi: np.ndarray  # (n, n)


@dataclass(frozen=True)
class MmseSummary:
    """Averaged posterior covariance over the observation law."""

    e_matrix: np.ndarray  # (n, n)
    diag_e: np.ndarray  # (n,)
    integration_error: np.ndarray  # (n, n), absolute per entry
    tolerance_met: bool


def posterior_responsibilities(model, y):
    """Posterior component probabilities given an observation (log-domain)."""
    return _mixture_of(model).responsibilities(y)


def conditional_moments(model, y) -> ConditionalMoments:
    """E[X|y], E[XX^T|y], and the posterior covariance, as exact atom sums.

    Moments are of the signal atoms themselves, not of the scaled signal.
    """
    mix = _mixture_of(model)
    r = mix.responsibilities(y)
    single = r.ndim == 1
    r2 = np.atleast_2d(r)
    m1 = r2 @ mix.atoms
    m2 = np.einsum("mk,ki,kj->mij", r2, mix.atoms, mix.atoms)
    phi = m2 - m1[:, None, :] * m1[:, :, None]
    if single:
        return ConditionalMoments(
            responsibilities=r, cond_mean=m1[0], cond_second_moment=m2[0], phi=phi[0]
        )
    return ConditionalMoments(
        responsibilities=r2, cond_mean=m1, cond_second_moment=m2, phi=phi
    )


def mmse_matrix(model, integrator: IntegratorConfig) -> MmseSummary:
    """Average the posterior covariance over the observation law."""
    est = mixture_moments(_mixture_of(model), integrator)
    e = est.e_phi
    return MmseSummary(
        e_matrix=e,
        diag_e=np.diag(e).copy(),
        integration_error=est.e_phi_err,
        tolerance_met=bool(est.e_phi_err.max() <= integrator.target_tolerance),
    )


def min_eigenvalue(matrix) -> float:
    sym = 0.5 * (matrix + matrix.T)
    return float(np.linalg.eigvalsh(sym).min())


def psd_margin_ok(matrix, rtol=PSD_RTOL) -> bool:
    """min eig >= -rtol * max(1, ||M||_2): PSD up to relative roundoff."""
    scale = max(1.0, float(np.linalg.norm(matrix, 2)))
    return min_eigenvalue(matrix) >= -rtol * scale

"""Expectations over the observation law.

Each mixture component is a Gaussian, so expectations against the
observation law decompose into per-component Gaussian integrals. Those
are evaluated with tensor-product Gauss-Hermite quadrature (deterministic,
spectrally accurate for the smooth integrands here) or with seeded Monte
Carlo for higher dimensions.

Error model: quadrature estimates carry the difference between the
configured order m and the halved order m/2 (the reported value is the
order-m one); Monte Carlo estimates carry the per-entry standard error.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from . import kernels
from .constellation import GaussianMixture, ValidationError

QUADRATURE = "quadrature"
MONTE_CARLO = "monte_carlo"

MC_DIMENSION_CUTOFF = 4  # default to Monte Carlo from this dimension up


@dataclass(frozen=True)
class IntegratorConfig:
    """Settings governing every expectation over the observation law."""

    method: str = QUADRATURE
    order: int = 48  # quadrature nodes per axis
    samples: int = 1_000_000  # Monte Carlo draws
    seed: int = 42
    target_tolerance: float = 1e-3  # absolute, per reported entry

    def __post_init__(self):
        if self.method not in (QUADRATURE, MONTE_CARLO):
            raise ValidationError(f"unknown integration method: {self.method!r}")
        if self.method == QUADRATURE and self.order < 4:
            raise ValidationError(f"quadrature order must be >= 4, got {self.order}")
        if self.method == MONTE_CARLO and self.samples < 1_000:
            raise ValidationError(f"sample count must be >= 1000, got {self.samples}")
        if not self.target_tolerance > 0:
            raise ValidationError("target tolerance must be positive")

    @classmethod
    def for_dimension(cls, n: int, **overrides) -> "IntegratorConfig":
        """Default policy: quadrature below MC_DIMENSION_CUTOFF, else MC."""
        method = QUADRATURE if n < MC_DIMENSION_CUTOFF else MONTE_CARLO
        return cls(method=method, **overrides) if "method" not in overrides else cls(**overrides)

    def with_(self, **overrides) -> "IntegratorConfig":
        return replace(self, **overrides)


@dataclass(frozen=True)
class MomentEstimates:
    """One integration pass over the observation law of a mixture.

    mean_log_density feeds the entropy; e_phi is the averaged posterior
    covariance of the atoms (the MMSE matrix); e_phi_sq is the averaged
    Hadamard square of that covariance. *_err are absolute per-entry
    error estimates; tolerance_met records whether the worst one beat the
    configured target.
    """

    mean_log_density: float
    e_phi: np.ndarray
    e_phi_sq: np.ndarray
    mean_log_density_err: float
    e_phi_err: np.ndarray
    e_phi_sq_err: np.ndarray
    tolerance_met: bool

    @property
    def entropy(self) -> float:
        return -self.mean_log_density

    @property
    def entropy_err(self) -> float:
        return self.mean_log_density_err


@lru_cache(maxsize=32)
def _gh_rule(order: int):
    x, w = np.polynomial.hermite.hermgauss(order)
    return x * np.sqrt(2.0), w / np.sqrt(np.pi)


@lru_cache(maxsize=32)
def _gh_grid(order: int, dim: int):
    """Tensor-product rule for a unit Gaussian in `dim` dimensions."""
    nodes1, w1 = _gh_rule(order)
    if dim == 1:
        return nodes1[:, None].copy(), w1.copy()
    axes = np.meshgrid(*([nodes1] * dim), indexing="ij")
    pts = np.stack([a.ravel() for a in axes], axis=1)
    wts = np.ones(pts.shape[0])
    waxes = np.meshgrid(*([w1] * dim), indexing="ij")
    for wa in waxes:
        wts = wts * wa.ravel()
    return np.ascontiguousarray(pts), wts


MAX_GRID_NODES = 5_000_000  # per-component tensor grid cap


def _quad_points(mix: GaussianMixture, order: int):
    """Yield (points, weights) per component, in component order."""
    if order**mix.dimension > MAX_GRID_NODES:
        raise ValidationError(
            f"tensor quadrature grid {order}^{mix.dimension} is too large; "
            "use the monte_carlo method for this dimension"
        )
    std = np.sqrt(mix.cov_diag)
    base_pts, base_w = _gh_grid(order, mix.dimension)
    probs = np.exp(mix.log_probs)
    for k in range(mix.size):
        yield mix.means[k] + base_pts * std[None, :], probs[k] * base_w


def _sweep(mix: GaussianMixture, points, weights):
    return kernels.moment_sweep(
        mix.atoms,
        mix.means,
        mix.log_probs,
        mix.inv_cov,
        mix.log_norm,
        points,
        weights,
    )


def _quad_pass(mix: GaussianMixture, order: int):
    n = mix.dimension
    w_sum = h1 = 0.0
    phi1 = np.zeros((n, n))
    phi2 = np.zeros((n, n))
    for pts, wts in _quad_points(mix, order):
        ws, a1, _, p1, p2, _ = _sweep(mix, pts, wts)
        w_sum += ws
        h1 += a1
        phi1 += p1
        phi2 += p2
    return h1 / w_sum, phi1 / w_sum, phi2 / w_sum


def mixture_moments(mix: GaussianMixture, cfg: IntegratorConfig) -> MomentEstimates:
    """Estimate E[log f], E[Phi], and E[Phi∘Phi] under the mixture law."""
    if cfg.method == QUADRATURE:
        mean_lf, e_phi, e_phi_sq = _quad_pass(mix, cfg.order)
        lo_lf, lo_phi, lo_phi_sq = _quad_pass(mix, max(4, cfg.order // 2))
        lf_err = abs(mean_lf - lo_lf)
        phi_err = np.abs(e_phi - lo_phi)
        phi_sq_err = np.abs(e_phi_sq - lo_phi_sq)
    else:
        pts = mix.sample(cfg.samples, cfg.seed)
        wts = np.full(cfg.samples, 1.0 / cfg.samples)
        ws, h1, h2, p1, p2, p4 = _sweep(mix, pts, wts)
        mean_lf = h1 / ws
        e_phi = p1 / ws
        e_phi_sq = p2 / ws
        m = float(cfg.samples)
        lf_err = float(np.sqrt(max(h2 / ws - mean_lf**2, 0.0) / m))
        phi_err = np.sqrt(np.clip(e_phi_sq - e_phi**2, 0.0, None) / m)
        phi_sq_err = np.sqrt(np.clip(p4 / ws - e_phi_sq**2, 0.0, None) / m)

    worst = max(lf_err, float(phi_err.max()), float(phi_sq_err.max()))
    return MomentEstimates(
        mean_log_density=float(mean_lf),
        e_phi=0.5 * (e_phi + e_phi.T),
        e_phi_sq=0.5 * (e_phi_sq + e_phi_sq.T),
        mean_log_density_err=float(lf_err),
        e_phi_err=phi_err,
        e_phi_sq_err=phi_sq_err,
        tolerance_met=bool(worst <= cfg.target_tolerance),
    )


def mixture_entropy(mix: GaussianMixture, cfg: IntegratorConfig):
    """(entropy, error estimate) of the mixture, in nats."""
    est = mixture_moments(mix, cfg)
    return est.entropy, est.entropy_err


def mixture_expectation(mix: GaussianMixture, func, cfg: IntegratorConfig):
    """Expectation of an arbitrary batched integrand under the mixture law.

    `func` maps an (M, n) batch of points to an (M, ...) array. Returns
    (value, error_estimate) with the same trailing shape. Used for the
    score-based identity checks; the hot fused quantities go through
    :func:`mixture_moments` instead.
    """
    if cfg.method == QUADRATURE:

        def run(order):
            num = None
            den = 0.0
            for pts, wts in _quad_points(mix, order):
                vals = np.asarray(func(pts), dtype=float)
                contrib = np.tensordot(wts, vals, axes=(0, 0))
                num = contrib if num is None else num + contrib
                den += wts.sum()
            return num / den

        hi = run(cfg.order)
        lo = run(max(4, cfg.order // 2))
        return hi, np.abs(hi - lo)

    pts = mix.sample(cfg.samples, cfg.seed)
    vals = np.asarray(func(pts), dtype=float)
    mean = vals.mean(axis=0)
    var = vals.var(axis=0)
    return mean, np.sqrt(np.clip(var, 0.0, None) / cfg.samples)

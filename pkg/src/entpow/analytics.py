"""Entropy, entropy power, mutual information, and their derivatives in
the per-component power parameters.

All derivative formulas are assembled from conditional-moment
expectations: one integration pass supplies E[log f], the averaged
posterior covariance E[Phi], and the averaged Hadamard square
E[Phi∘Phi], from which

    grad h  = diag(E[Phi]) / 2
    hess h  = -E[Phi∘Phi] / 2
    hess N  = (N/n) * (dd^T/n - E[Phi∘Phi]),   d = diag(E[Phi])

follow. The reciprocal parametrization (inverse powers moved onto the
noise) is exposed for cross-checks; it is undefined on the zero-power
boundary, while the direct formulas above are not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import (
    ChannelModel,
    GaussianMixture,
    ScalingVector,
    ValidationError,
    _mixture_of,
    _readonly,
)
from .integrate import (
    QUADRATURE as QUADRATURE_METHOD,
    IntegratorConfig,
    mixture_entropy,
    mixture_expectation,
    mixture_moments,
)
from .mmse import conditional_moments

LOG_TWO_PI_E = float(np.log(2.0 * np.pi * np.e))


def gaussian_entropy(n: int, variance: float = 1.0) -> float:
    """Entropy of an isotropic Gaussian with the given per-axis variance."""
    return 0.5 * n * (LOG_TWO_PI_E + np.log(variance))


def entropy_power_of(entropy: float, n: int) -> float:
    return float(np.exp(2.0 * entropy / n) / (2.0 * np.pi * np.e))


@dataclass(frozen=True)
class EntropyReport:
    """Entropy in nats plus the derived entropy power and mutual
    information, each with an error estimate propagated from the entropy."""

    dimension: int
    entropy: float
    entropy_power: float
    mutual_information: float
    error_estimate: dict
    tolerance_met: bool

    @classmethod
    def from_entropy(cls, h: float, h_err: float, n: int, tolerance_met: bool):
        ep = entropy_power_of(h, n)
        return cls(
            dimension=n,
            entropy=float(h),
            entropy_power=ep,
            mutual_information=float(h - gaussian_entropy(n)),
            error_estimate={
                "entropy": float(h_err),
                "entropy_power": float(ep * 2.0 * h_err / n),
                "mutual_information": float(h_err),
            },
            tolerance_met=tolerance_met,
        )


@dataclass(frozen=True)
class HessianReport:
    """Gradient/Hessian of entropy and the entropy-power Hessian in the
    per-component powers, with definiteness certificates."""

    gradient_h: np.ndarray
    hessian_h: np.ndarray
    hessian_n: np.ndarray
    max_eigenvalue_h: float
    max_eigenvalue_n: float
    entropy: float
    entropy_power: float
    error_estimate: dict
    tolerance_met: bool = True
    fd_residuals: dict | None = None


@dataclass(frozen=True)
class ReciprocalView:
    """The same observation rewritten as signal plus scaled noise.

    Defined only for strictly positive powers; gamma holds the inverse
    powers and z_model the resulting diagonal-covariance mixture."""

    gamma: np.ndarray
    z_model: GaussianMixture


@dataclass(frozen=True)
class CheckResult:
    """Residual of a two-route identity check plus the tolerance it is
    expected to meet (3x the combined error estimates unless a floor
    applies)."""

    residual: np.ndarray | float
    bound: np.ndarray | float
    passed: bool
    lhs: np.ndarray | float | None = None
    rhs: np.ndarray | float | None = None


def _require_diagonal(model: ChannelModel) -> np.ndarray:
    if not isinstance(model.scaling, ScalingVector):
        raise ValidationError("operation requires a per-component (diagonal) scaling")
    return model.scaling.lam


def differential_entropy(model, cfg: IntegratorConfig) -> EntropyReport:
    """h = -E[log f] over the observation law, via the configured method."""
    mix = _mixture_of(model)
    est = mixture_moments(mix, cfg)
    return EntropyReport.from_entropy(
        est.entropy,
        est.entropy_err,
        mix.dimension,
        est.entropy_err <= cfg.target_tolerance,
    )


def entropy_gradient(model: ChannelModel, cfg: IntegratorConfig):
    """Gradient of entropy in the powers: half the averaged posterior
    variances, valid on the zero-power boundary as well."""
    _require_diagonal(model)
    est = mixture_moments(model.mixture, cfg)
    return 0.5 * np.diag(est.e_phi).copy()


def entropy_hessian(model: ChannelModel, cfg: IntegratorConfig):
    """Hessian of entropy in the powers: minus half the averaged Hadamard
    square of the posterior covariance. Every entry is nonpositive."""
    _require_diagonal(model)
    est = mixture_moments(model.mixture, cfg)
    return -0.5 * est.e_phi_sq


def _assemble_power_hessian(entropy, e_phi, e_phi_sq, n):
    ep = entropy_power_of(entropy, n)
    d = np.diag(e_phi)
    return ep, (ep / n) * (np.outer(d, d) / n - e_phi_sq)


def entropy_power_hessian(model: ChannelModel, cfg: IntegratorConfig) -> HessianReport:
    """Full report from a single integration pass: gradient and Hessian of
    the entropy plus the entropy-power Hessian and both maximum
    eigenvalues."""
    _require_diagonal(model)
    mix = model.mixture
    est = mixture_moments(mix, cfg)
    hess_h = -0.5 * est.e_phi_sq
    ep, hess_n = _assemble_power_hessian(
        est.entropy, est.e_phi, est.e_phi_sq, mix.dimension
    )
    errors = {
        "entropy": est.entropy_err,
        "gradient_h": 0.5 * float(np.diag(est.e_phi_err).max()),
        "hessian_h": 0.5 * float(est.e_phi_sq_err.max()),
    }
    worst_err = max(
        est.entropy_err, float(est.e_phi_err.max()), float(est.e_phi_sq_err.max())
    )
    errors["hessian_n"] = (ep / mix.dimension) * worst_err * 3.0
    return HessianReport(
        gradient_h=0.5 * np.diag(est.e_phi).copy(),
        hessian_h=hess_h,
        hessian_n=hess_n,
        max_eigenvalue_h=float(np.linalg.eigvalsh(hess_h).max()),
        max_eigenvalue_n=float(np.linalg.eigvalsh(hess_n).max()),
        entropy=est.entropy,
        entropy_power=ep,
        error_estimate=errors,
        tolerance_met=bool(worst_err <= cfg.target_tolerance),
    )


def chain_rule_assembly_check(model: ChannelModel, cfg: IntegratorConfig) -> CheckResult:
    """The entropy-power Hessian assembled directly must equal the
    chain-rule assembly (2N/n)(2 grad grad^T / n + hess_h) from the same
    moment estimates; agreement is algebraic, so the residual is pure
    floating point."""
    _require_diagonal(model)
    mix = model.mixture
    est = mixture_moments(mix, cfg)
    n = mix.dimension
    grad = 0.5 * np.diag(est.e_phi)
    hess_h = -0.5 * est.e_phi_sq
    ep, direct = _assemble_power_hessian(est.entropy, est.e_phi, est.e_phi_sq, n)
    chained = (2.0 * ep / n) * (2.0 * np.outer(grad, grad) / n + hess_h)
    scale = max(np.linalg.norm(direct), np.linalg.norm(chained), 1e-300)
    residual = float(np.linalg.norm(direct - chained) / scale)
    return CheckResult(residual=residual, bound=1e-12, passed=residual <= 1e-12)


def reciprocal_view(model: ChannelModel) -> ReciprocalView:
    """Rewrite the observation with inverse powers on the noise side."""
    lam = _require_diagonal(model)
    if np.any(lam <= 0):
        raise ValidationError(
            "reciprocal parametrization needs strictly positive powers"
        )
    gamma = 1.0 / lam
    z_model = GaussianMixture(
        atoms=model.constellation.points,
        means=model.constellation.points,
        log_probs=model.mixture.log_probs,
        cov_diag=_readonly(gamma),
    )
    return ReciprocalView(gamma=_readonly(gamma), z_model=z_model)


def _independent_cfg(cfg: IntegratorConfig) -> IntegratorConfig:
    """A second rule for two-route checks. Per-component quadrature is
    equivariant under the reciprocal rescaling (the node sets correspond
    exactly), so reusing the same order would compare a computation with
    itself; shifting the order (or the seed) makes the runs independent."""
    if cfg.method == QUADRATURE_METHOD:
        return cfg.with_(order=cfg.order + 8)
    return cfg.with_(seed=cfg.seed + 1)


def reciprocal_identity_check(model: ChannelModel, cfg: IntegratorConfig) -> CheckResult:
    """Entropy of the scaled-signal observation must equal the entropy of
    the signal-plus-scaled-noise observation plus half the log-determinant
    of the scaling; both sides are integrated independently."""
    lam = _require_diagonal(model)
    view = reciprocal_view(model)
    lhs, lhs_err = mixture_entropy(model.mixture, cfg)
    rhs_h, rhs_err = mixture_entropy(view.z_model, _independent_cfg(cfg))
    rhs = rhs_h + 0.5 * float(np.sum(np.log(lam)))
    denom = max(1.0, abs(lhs))
    residual = abs(lhs - rhs) / denom
    bound = 3.0 * (lhs_err + rhs_err) / denom
    return CheckResult(residual=residual, bound=bound, passed=residual <= bound, lhs=lhs, rhs=rhs)


def _entropy_at_gamma(model: ChannelModel, gamma, cfg: IntegratorConfig):
    z = GaussianMixture(
        atoms=model.constellation.points,
        means=model.constellation.points,
        log_probs=model.mixture.log_probs,
        cov_diag=_readonly(np.asarray(gamma, dtype=float)),
    )
    return mixture_entropy(z, cfg)


def de_bruijn_check(
    model: ChannelModel, cfg: IntegratorConfig, fd_step: float = 1e-4
) -> CheckResult:
    """Per-component derivative of entropy in the inverse powers must
    equal half the expected squared score component. The left side is a
    central finite difference; the right side integrates the exact
    mixture score."""
    view = reciprocal_view(model)
    gamma = view.gamma
    n = gamma.shape[0]

    rhs, rhs_err = mixture_expectation(
        view.z_model, lambda pts: view.z_model.score(pts) ** 2, cfg
    )
    rhs = 0.5 * rhs
    rhs_err = 0.5 * rhs_err

    lhs = np.zeros(n)
    lhs_err = np.zeros(n)
    for i in range(n):
        step = fd_step * max(1.0, gamma[i])
        gp = gamma.copy()
        gp[i] += step
        gm = gamma.copy()
        gm[i] -= step
        hp, ep = _entropy_at_gamma(model, gp, cfg)
        hm, em = _entropy_at_gamma(model, gm, cfg)
        lhs[i] = (hp - hm) / (2.0 * step)
        lhs_err[i] = (ep + em) / (2.0 * step)

    residual = np.abs(lhs - rhs)
    bound = np.maximum(1e-4, 3.0 * (lhs_err + rhs_err))
    return CheckResult(
        residual=residual, bound=bound, passed=bool(np.all(residual <= bound)),
        lhs=lhs, rhs=rhs,
    )


def score_identity_check(
    model: ChannelModel, cfg: IntegratorConfig, draws: int = 100
) -> CheckResult:
    """The mixture score of the reciprocal model must equal
    (posterior mean - observation) / gamma componentwise; both sides are
    exact finite sums, so the residual is pure floating point."""
    view = reciprocal_view(model)
    z = view.z_model.sample(draws, cfg.seed)
    lhs = view.z_model.score(z)
    rhs = (conditional_moments(view.z_model, z).cond_mean - z) / view.gamma[None, :]
    residual = float(np.abs(lhs - rhs).max())
    return CheckResult(residual=residual, bound=1e-10, passed=residual <= 1e-10)


def hessian_gamma_check(model: ChannelModel, cfg: IntegratorConfig) -> CheckResult:
    """Route the entropy Hessian through the inverse-power parametrization
    and map it back; it must reproduce the direct power-space Hessian.

    In the reciprocal model the log-density Hessian is
    Phi_ij/(g_i g_j) - delta_ij/g_i, so the inverse-power entropy Hessian
    is -E[(that)^2]/2 and the gradient is (g_i - E[Phi_ii])/(2 g_i^2);
    the chain rule for g = 1/lam then gives the power-space Hessian.
    """
    lam = _require_diagonal(model)
    view = reciprocal_view(model)
    g = view.gamma
    n = g.shape[0]

    est_z = mixture_moments(view.z_model, _independent_cfg(cfg))
    e_phi_z = est_z.e_phi
    e_phi_sq_z = est_z.e_phi_sq

    gg = np.outer(g, g)
    hess_gamma = -0.5 * (
        e_phi_sq_z / gg**2
        - 2.0 * np.diag(np.diag(e_phi_z) / g**3)
        + np.diag(1.0 / g**2)
    )
    grad_gamma = (g - np.diag(e_phi_z)) / (2.0 * g**2)

    mapped = (
        np.outer(g**2, g**2) * hess_gamma
        + np.diag(2.0 * g**3 * grad_gamma)
        - np.diag(0.5 * g**2)
    )

    est_y = mixture_moments(model.mixture, cfg)
    direct = -0.5 * est_y.e_phi_sq

    denom = max(1.0, float(np.abs(direct).max()))
    residual = np.abs(mapped - direct) / denom
    # the gradient and delta terms cancel algebraically in the mapping, so
    # what remains is the two Hadamard-square estimates on their two grids
    err_combined = 0.5 * (est_z.e_phi_sq_err + est_y.e_phi_sq_err)
    bound = np.maximum(1e-3, 3.0 * err_combined / denom)
    return CheckResult(
        residual=residual, bound=bound, passed=bool(np.all(residual <= bound)),
        lhs=mapped, rhs=direct,
    )


def fd_entropy_gradient(model: ChannelModel, cfg: IntegratorConfig, step_scale: float = 1e-4):
    """Finite-difference gradient of the entropy in the powers: central
    steps 1e-4 * max(1, lam_i), one-sided at the zero boundary."""
    lam = _require_diagonal(model)
    con = model.constellation
    out = np.zeros(lam.shape[0])
    for i in range(lam.shape[0]):
        step = step_scale * max(1.0, lam[i])
        lp = lam.copy()
        lp[i] += step
        hp, _ = mixture_entropy(ChannelModel(con, ScalingVector(lp)).mixture, cfg)
        if lam[i] - step >= 0:
            lm = lam.copy()
            lm[i] -= step
            hm, _ = mixture_entropy(ChannelModel(con, ScalingVector(lm)).mixture, cfg)
            out[i] = (hp - hm) / (2.0 * step)
        else:
            h0, _ = mixture_entropy(model.mixture, cfg)
            out[i] = (hp - h0) / step
    return out


def fd_entropy_hessian(model: ChannelModel, cfg: IntegratorConfig, step_scale: float = 1e-4):
    """Finite differences of the analytic gradient, column by column."""
    lam = _require_diagonal(model)
    con = model.constellation
    n = lam.shape[0]
    cols = np.zeros((n, n))
    for i in range(n):
        step = step_scale * max(1.0, lam[i])
        lp = lam.copy()
        lp[i] += step
        gp = entropy_gradient(ChannelModel(con, ScalingVector(lp)), cfg)
        if lam[i] - step >= 0:
            lm = lam.copy()
            lm[i] -= step
            gm = entropy_gradient(ChannelModel(con, ScalingVector(lm)), cfg)
            cols[:, i] = (gp - gm) / (2.0 * step)
        else:
            g0 = entropy_gradient(model, cfg)
            cols[:, i] = (gp - g0) / step
    return 0.5 * (cols + cols.T)


def fd_residual_block(model: ChannelModel, cfg: IntegratorConfig) -> dict:
    """Residuals of the analytic gradient/Hessian against their
    finite-difference counterparts, with the bounds they must meet."""
    report = entropy_power_hessian(model, cfg)
    est = mixture_moments(model.mixture, cfg)
    grad_fd = fd_entropy_gradient(model, cfg)
    hess_fd = fd_entropy_hessian(model, cfg)
    grad_res = float(np.abs(report.gradient_h - grad_fd).max())
    hess_res = float(np.abs(report.hessian_h - hess_fd).max())
    grad_bound = float(max(1e-4, 3.0 * est.e_phi_err.max()))
    hess_bound = float(max(1e-3, 3.0 * est.e_phi_sq_err.max()))
    return {
        "gradient_residual": grad_res,
        "gradient_bound": grad_bound,
        "hessian_residual": hess_res,
        "hessian_bound": hess_bound,
        "passed": bool(grad_res <= grad_bound and hess_res <= hess_bound),
    }


def lambda_sweep(constellation, lam_grid, cfg: IntegratorConfig):
    """Rows for a power-sweep export: one dict per grid point with the
    powers, entropy, entropy power, mutual information, and the maximum
    eigenvalues of both Hessians."""
    rows = []
    for lam in lam_grid:
        model = ChannelModel(constellation, ScalingVector(np.asarray(lam, dtype=float)))
        report = entropy_power_hessian(model, cfg)
        n = model.dimension
        row = {f"lambda_{i + 1}": float(model.scaling.lam[i]) for i in range(n)}
        row.update(
            h=report.entropy,
            N=report.entropy_power,
            I=float(report.entropy - gaussian_entropy(n)),
            max_eig_hess_h=report.max_eigenvalue_h,
            max_eig_hess_N=report.max_eigenvalue_n,
        )
        rows.append(row)
    return rows

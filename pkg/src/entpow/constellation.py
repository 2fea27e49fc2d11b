"""Channel model: a finite-alphabet signal with per-component power
scaling observed in independent unit-variance Gaussian noise.

The observation is an exact Gaussian mixture, so its log-density, score,
and log-density Hessian are finite sums over the signal atoms — no
integration is involved at a single observation point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

LOG_TWO_PI = float(np.log(2.0 * np.pi))

PROB_RENORM_TOL = 1e-9  # silently renormalize when the sum is off by no more
PROB_SUM_TOL = 1e-12  # ... and this is how exact the stored sum must be


class ValidationError(ValueError):
    """Raised when user-supplied model inputs violate an invariant."""


def _readonly(a, dtype=float):
    out = np.ascontiguousarray(np.asarray(a, dtype=dtype))
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Constellation:
    """Finite-support signal law: K atoms in R^n with probabilities.

    Duplicate atoms are kept as distinct mass points, and a single atom
    (a deterministic signal) is allowed. Construct through
    :func:`validate_constellation` or :meth:`from_arrays`.
    """

    points: np.ndarray  # (K, n), read-only
    probs: np.ndarray  # (K,), read-only

    @classmethod
    def from_arrays(cls, points, probs):
        return validate_constellation(points, probs)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def prior_mean(self):
        return self.probs @ self.points

    def prior_cov(self):
        m = self.prior_mean()
        second = np.einsum("k,ki,kj->ij", self.probs, self.points, self.points)
        return second - np.outer(m, m)


def validate_constellation(points, probs) -> Constellation:
    """Validate raw atom/probability lists into a Constellation.

    Probabilities are renormalized only when their sum is within
    PROB_RENORM_TOL of one; a larger deviation is rejected.
    """
    try:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        pr = np.asarray(probs, dtype=float).ravel()
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"malformed constellation input: {exc}") from exc
    if pts.size == 0 or pr.size == 0:
        raise ValidationError("constellation needs at least one atom")
    if pts.shape[0] != pr.shape[0]:
        raise ValidationError(
            f"{pts.shape[0]} atoms but {pr.shape[0]} probabilities"
        )
    if not np.all(np.isfinite(pts)):
        raise ValidationError("non-finite atom coordinates")
    if not np.all(np.isfinite(pr)):
        raise ValidationError("non-finite probabilities")
    if np.any(pr < 0):
        raise ValidationError(f"negative probability: min={pr.min()}")
    total = pr.sum()
    if abs(total - 1.0) > PROB_RENORM_TOL:
        raise ValidationError(f"probabilities sum to {total}, not 1")
    pr = pr / total
    return Constellation(points=_readonly(pts), probs=_readonly(pr))


@dataclass(frozen=True)
class ScalingVector:
    """Per-component signal powers (the diagonal of the scaling matrix)."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float).ravel()
        if lam.size == 0:
            raise ValidationError("empty scaling vector")
        if not np.all(np.isfinite(lam)):
            raise ValidationError("non-finite scaling entries")
        if np.any(lam < 0):
            raise ValidationError(f"negative scaling entry: min={lam.min()}")
        object.__setattr__(self, "lam", _readonly(lam))

    @property
    def dimension(self) -> int:
        return self.lam.shape[0]

    def sqrt(self):
        return np.sqrt(self.lam)


@dataclass(frozen=True)
class MatrixScaling:
    """Full symmetric PSD scaling T together with a factor A, A A^T = T.

    The factor is stored explicitly: entropy is invariant to the choice
    of square root (the noise is isotropic), so the caller controls which
    root is used rather than the model guessing one.
    """

    t: np.ndarray
    factor: np.ndarray

    def __post_init__(self):
        t = np.atleast_2d(np.asarray(self.t, dtype=float))
        a = np.atleast_2d(np.asarray(self.factor, dtype=float))
        if t.shape[0] != t.shape[1] or a.shape != t.shape:
            raise ValidationError(f"shape mismatch: T {t.shape}, factor {a.shape}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(a))):
            raise ValidationError("non-finite scaling matrix entries")
        scale = max(1.0, float(np.linalg.norm(t, 2)))
        if np.abs(t - t.T).max() > 1e-12 * scale:
            raise ValidationError("scaling matrix is not symmetric")
        if float(np.linalg.eigvalsh(t).min()) < -1e-10 * scale:
            raise ValidationError("scaling matrix is not positive semidefinite")
        if np.abs(a @ a.T - t).max() > 1e-10 * scale:
            raise ValidationError("factor does not reconstruct the scaling matrix")
        object.__setattr__(self, "t", _readonly(t))
        object.__setattr__(self, "factor", _readonly(a))

    @classmethod
    def from_matrix(cls, t) -> "MatrixScaling":
        """Build from T alone using the symmetric PSD square root."""
        t = np.atleast_2d(np.asarray(t, dtype=float))
        t = 0.5 * (t + t.T)
        vals, vecs = np.linalg.eigh(t)
        root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
        return cls(t=t, factor=root)

    @classmethod
    def from_factor(cls, a) -> "MatrixScaling":
        a = np.atleast_2d(np.asarray(a, dtype=float))
        return cls(t=a @ a.T, factor=a)

    @property
    def dimension(self) -> int:
        return self.t.shape[0]


@dataclass(frozen=True)
class GaussianMixture:
    """Mixture of K Gaussians with a shared diagonal covariance.

    `atoms` carries the latent signal value attached to each component so
    that posterior moments of the signal can be formed from the same
    responsibilities as the density itself.
    """

    atoms: np.ndarray  # (K, n)
    means: np.ndarray  # (K, n)
    log_probs: np.ndarray  # (K,)
    cov_diag: np.ndarray  # (n,)

    @property
    def dimension(self) -> int:
        return self.means.shape[1]

    @property
    def size(self) -> int:
        return self.means.shape[0]

    @property
    def inv_cov(self):
        return 1.0 / self.cov_diag

    @property
    def log_norm(self) -> float:
        # -0.5 * sum_i log(2 pi c_i)
        return -0.5 * float(np.sum(LOG_TWO_PI + np.log(self.cov_diag)))

    def _component_logs(self, y):
        """(M, K) component log-densities incl. weights for batched y."""
        d = y[:, None, :] - self.means[None, :, :]
        quad = np.einsum("mkn,n->mk", d * d, self.inv_cov)
        return self.log_probs[None, :] + self.log_norm - 0.5 * quad

    def log_density(self, y):
        y, single = _as_batch(y, self.dimension)
        q = self._component_logs(y)
        qmax = q.max(axis=1)
        out = qmax + np.log(np.exp(q - qmax[:, None]).sum(axis=1))
        return float(out[0]) if single else out

    def responsibilities(self, y):
        y, single = _as_batch(y, self.dimension)
        q = self._component_logs(y)
        qmax = q.max(axis=1)
        ex = np.exp(q - qmax[:, None])
        r = ex / ex.sum(axis=1)[:, None]
        return r[0] if single else r

    def score(self, y):
        """Gradient of the log-density: (E[mean | y] - y) / cov, exactly."""
        y, single = _as_batch(y, self.dimension)
        r = np.atleast_2d(self.responsibilities(y))
        out = (r @ self.means - y) * self.inv_cov[None, :]
        return out[0] if single else out

    def log_density_hessian(self, y):
        """Exact Hessian: C^-1 Cov[mean | y] C^-1 - C^-1 (C the covariance)."""
        y, single = _as_batch(y, self.dimension)
        r = np.atleast_2d(self.responsibilities(y))
        m1 = r @ self.means
        m2 = np.einsum("mk,ki,kj->mij", r, self.means, self.means)
        cov = m2 - m1[:, None, :] * m1[:, :, None]
        ic = self.inv_cov
        out = ic[None, :, None] * cov * ic[None, None, :] - np.diag(ic)[None, :, :]
        return out[0] if single else out

    def sample(self, count, seed):
        """Draw observations: component indices first, then one block of
        standard normals scaled by the covariance. Deterministic per seed."""
        if count < 1:
            raise ValidationError(f"count must be >= 1, got {count}")
        rng = np.random.default_rng(seed)
        ks = rng.choice(self.size, size=count, p=np.exp(self.log_probs))
        z = rng.standard_normal((count, self.dimension))
        return self.means[ks] + z * np.sqrt(self.cov_diag)[None, :]


def _as_batch(y, n):
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValidationError("non-finite observation")
    if y.ndim == 1:
        if y.shape[0] != n:
            raise ValidationError(f"observation has length {y.shape[0]}, expected {n}")
        return y[None, :], True
    if y.ndim == 2 and y.shape[1] == n:
        return y, False
    raise ValidationError(f"observation batch has shape {y.shape}, expected (*, {n})")


@dataclass(frozen=True)
class ChannelModel:
    """Observation = scaled signal + white unit Gaussian noise."""

    constellation: Constellation
    scaling: ScalingVector | MatrixScaling

    def __post_init__(self):
        if self.constellation.dimension != self.scaling.dimension:
            raise ValidationError(
                f"scaling dimension {self.scaling.dimension} does not match "
                f"constellation dimension {self.constellation.dimension}"
            )

    @property
    def dimension(self) -> int:
        return self.constellation.dimension

    @property
    def is_diagonal(self) -> bool:
        return isinstance(self.scaling, ScalingVector)

    @cached_property
    def mixture(self) -> GaussianMixture:
        con = self.constellation
        if isinstance(self.scaling, ScalingVector):
            means = con.points * self.scaling.sqrt()[None, :]
        else:
            means = con.points @ self.scaling.factor.T
        with np.errstate(divide="ignore"):
            logp = np.log(con.probs)
        return GaussianMixture(
            atoms=con.points,
            means=_readonly(means),
            log_probs=_readonly(logp),
            cov_diag=_readonly(np.ones(con.dimension)),
        )


def diagonal_model(constellation: Constellation, lam) -> ChannelModel:
    return ChannelModel(constellation, ScalingVector(np.asarray(lam, dtype=float)))


def matrix_model(constellation: Constellation, scaling: MatrixScaling) -> ChannelModel:
    return ChannelModel(constellation, scaling)


def _mixture_of(model) -> GaussianMixture:
    if isinstance(model, GaussianMixture):
        return model
    return model.mixture


def mixture_log_density(model, y):
    """log f(y) of the observation mixture, max-shifted for stability."""
    return _mixture_of(model).log_density(y)


def score(model, y):
    """Gradient of the observation log-density at y (an exact finite sum)."""
    return _mixture_of(model).score(y)


def log_density_hessian(model, y):
    """Hessian of the observation log-density at y; plus the identity it is
    a conditional covariance pushed through the scaling, hence PSD + (-I)."""
    return _mixture_of(model).log_density_hessian(y)


def sample_outputs(model, count, seed):
    """I.i.d. observation draws, bit-reproducible for a given seed."""
    return _mixture_of(model).sample(count, seed)


def load_constellation(path) -> Constellation:
    """Read the JSON constellation format:
    {"n": int, "points": [[...], ...], "probs": [...]}."""
    with open(path) as fh:
        raw = json.load(fh)
    try:
        n = int(raw["n"])
        points = raw["points"]
        probs = raw["probs"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed constellation file {path}: {exc}") from exc
    con = validate_constellation(points, probs)
    if con.dimension != n:
        raise ValidationError(
            f"constellation file {path} declares n={n} but points have "
            f"dimension {con.dimension}"
        )
    return con


def dump_constellation(con: Constellation, path):
    payload = {
        "n": con.dimension,
        "points": con.points.tolist(),
        "probs": con.probs.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

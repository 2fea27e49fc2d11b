"""Empirical concavity probes along scaling segments.

A probe evaluates the entropy power on a parameter grid and scans the
centered second differences: concavity requires every one of them to be
nonpositive, so a second difference exceeding +4x its propagated
integration error is a violation certificate. Along per-component power
segments no violation can occur (that would indicate an implementation
bug, not new mathematics); along full-matrix segments the scan is a
counterexample search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import (
    ChannelModel,
    Constellation,
    MatrixScaling,
    ScalingVector,
    ValidationError,
)
from .analytics import differential_entropy
from .integrate import IntegratorConfig

VIOLATION_FACTOR = 4.0
# floor keeps exact-to-roundoff values (e.g. constant N) from flagging
ROUNDOFF_FLOOR = 1e-12


@dataclass(frozen=True)
class SegmentProbe:
    kind: str
    endpoints: tuple  # the two scalings spanning the probe, or None
    ts: np.ndarray
    values: np.ndarray  # entropy power at each grid point
    errors: np.ndarray  # per-point absolute error estimates
    second_differences: np.ndarray  # length grid-2, centered
    thresholds: np.ndarray  # violation thresholds per interior point
    min_second_difference: float
    max_second_difference: float
    violation: bool
    violation_index: int | None


def second_difference_scan(kind, ts, values, errors, endpoints=None) -> SegmentProbe:
    """Scan centered second differences against +4x propagated error."""
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if values.shape[0] < 3:
        raise ValidationError("a concavity scan needs at least 3 grid points")
    sd = values[2:] - 2.0 * values[1:-1] + values[:-2]
    propagated = errors[2:] + 2.0 * errors[1:-1] + errors[:-2]
    floor = ROUNDOFF_FLOOR * max(1.0, float(np.abs(values).max()))
    thresholds = np.maximum(VIOLATION_FACTOR * propagated, floor)
    over = sd > thresholds
    violation = bool(over.any())
    index = int(np.argmax(sd - thresholds) + 1) if violation else None
    return SegmentProbe(
        kind=kind,
        endpoints=endpoints,
        ts=ts,
        values=values,
        errors=errors,
        second_differences=sd,
        thresholds=thresholds,
        min_second_difference=float(sd.min()),
        max_second_difference=float(sd.max()),
        violation=violation,
        violation_index=index,
    )


def _entropy_power_with_error(model: ChannelModel, cfg: IntegratorConfig):
    rep = differential_entropy(model, cfg)
    return rep.entropy_power, rep.error_estimate["entropy_power"]


def probe_diagonal_segment(
    constellation: Constellation, lam_a, lam_b, grid: int, cfg: IntegratorConfig
) -> SegmentProbe:
    """Entropy power along the straight segment between two power vectors.

    Concave by the power-space Hessian certificate, so the violation flag
    must stay false; a flag here is a self-check failure.
    """
    lam_a = ScalingVector(np.asarray(lam_a, dtype=float))
    lam_b = ScalingVector(np.asarray(lam_b, dtype=float))
    if lam_a.dimension != lam_b.dimension:
        raise ValidationError("segment endpoints have different dimensions")
    if grid < 3:
        raise ValidationError("grid must have at least 3 points")
    ts = np.linspace(0.0, 1.0, grid)
    values = np.zeros(grid)
    errors = np.zeros(grid)
    for i, t in enumerate(ts):
        lam = (1.0 - t) * lam_a.lam + t * lam_b.lam
        model = ChannelModel(constellation, ScalingVector(lam))
        values[i], errors[i] = _entropy_power_with_error(model, cfg)
    return second_difference_scan("diagonal", ts, values, errors, endpoints=(lam_a, lam_b))


def probe_scalar_costa(
    constellation: Constellation,
    lam0,
    mode: str,
    t_max: float,
    grid: int,
    cfg: IntegratorConfig,
    t_min: float = 0.0,
) -> SegmentProbe:
    """Entropy power along a scalar path.

    signal mode: powers t * lam0 for t in [t_min, t_max] (t_min may be 0).
    noise mode: noise variance t, reduced through the exact scaling
    identity N(scaled signal + sqrt(t) noise) = t * N(signal at powers
    lam0/t + unit noise); the grid must stay away from t = 0.
    """
    lam0 = ScalingVector(np.asarray(lam0, dtype=float))
    if grid < 3:
        raise ValidationError("grid must have at least 3 points")
    if t_max <= t_min:
        raise ValidationError("t_max must exceed t_min")
    if mode not in ("signal", "noise"):
        raise ValidationError(f"unknown scalar probe mode: {mode!r}")
    if mode == "noise" and t_min < 1e-3:
        raise ValidationError("noise mode needs the grid bounded away from 0 (t >= 1e-3)")
    ts = np.linspace(t_min, t_max, grid)
    values = np.zeros(grid)
    errors = np.zeros(grid)
    for i, t in enumerate(ts):
        if mode == "signal":
            model = ChannelModel(constellation, ScalingVector(t * lam0.lam))
            values[i], errors[i] = _entropy_power_with_error(model, cfg)
        else:
            model = ChannelModel(constellation, ScalingVector(lam0.lam / t))
            ep, err = _entropy_power_with_error(model, cfg)
            values[i], errors[i] = t * ep, t * err
    if mode == "signal":
        ends = (ScalingVector(ts[0] * lam0.lam), ScalingVector(ts[-1] * lam0.lam))
    else:
        ends = (ScalingVector(lam0.lam / ts[0]), ScalingVector(lam0.lam / ts[-1]))
    return second_difference_scan(f"scalar-{mode}", ts, values, errors, endpoints=ends)


def _symmetric_root(t):
    vals, vecs = np.linalg.eigh(0.5 * (t + t.T))
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def probe_matrix_segment(
    constellation: Constellation, t_a, t_b, grid: int, cfg: IntegratorConfig
) -> SegmentProbe:
    """Entropy power along a segment of full symmetric PSD scalings.

    The symmetric PSD root is recomputed at every grid point (entropy is
    root-invariant, and the symmetric root varies continuously along the
    segment). A positive finding here is a genuine counterexample
    certificate for full-matrix concavity.
    """
    scale_a = MatrixScaling.from_matrix(np.asarray(t_a, dtype=float))
    scale_b = MatrixScaling.from_matrix(np.asarray(t_b, dtype=float))
    if scale_a.dimension != scale_b.dimension:
        raise ValidationError("segment endpoints have different dimensions")
    if grid < 3:
        raise ValidationError("grid must have at least 3 points")
    ts = np.linspace(0.0, 1.0, grid)
    values = np.zeros(grid)
    errors = np.zeros(grid)
    for i, t in enumerate(ts):
        mat = (1.0 - t) * scale_a.t + t * scale_b.t
        scaling = MatrixScaling(t=0.5 * (mat + mat.T), factor=_symmetric_root(mat))
        model = ChannelModel(constellation, scaling)
        values[i], errors[i] = _entropy_power_with_error(model, cfg)
    return second_difference_scan("matrix", ts, values, errors, endpoints=(scale_a, scale_b))


def search_matrix_counterexample(
    constellation: Constellation,
    pairs: int,
    grid: int,
    cfg: IntegratorConfig,
    seed: int = 0,
    scale: float = 2.0,
):
    """Budgeted random search for a full-matrix concavity violation.

    Draws seeded pairs of (generally non-commuting) PSD endpoints, probes
    each segment, and returns the per-pair probes plus a summary of any
    positive finding. Finding one is an empirical outcome, not a
    guarantee either way.
    """
    n = constellation.dimension
    probes = []
    findings = []
    for p in range(pairs):
        rng = np.random.default_rng(seed + p)
        c1 = rng.standard_normal((n, n)) * np.sqrt(scale / n)
        c2 = rng.standard_normal((n, n)) * np.sqrt(scale / n)
        probe = probe_matrix_segment(constellation, c1 @ c1.T, c2 @ c2.T, grid, cfg)
        probes.append(probe)
        if probe.violation:
            findings.append(p)
    return probes, findings

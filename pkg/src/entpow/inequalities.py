"""Property-checkable positive-semidefiniteness facts about block
matrices, Hadamard products, and Schur complements.

Verdicts come from symmetric eigendecompositions rather than
factorization success so that every report carries a quantitative margin
and, on failure, the witness eigenvector. Tolerances are relative to
max(1, spectral norm) to keep large random instances from producing
spurious failures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import ValidationError

DEFAULT_RTOL = 1e-9


@dataclass(frozen=True)
class PsdCheckReport:
    claim: str
    min_eigenvalue: float
    tolerance: float
    passed: bool
    witness: np.ndarray | None = None  # eigvec of the most negative eigenvalue


@dataclass(frozen=True)
class SchurEquivalenceReport:
    """Truth values of the three equivalent block-definiteness statements."""

    block_psd: bool
    complement_in_b: bool
    complement_in_a: bool
    margins: tuple
    agree: bool


@dataclass(frozen=True)
class ScalarBoundReport:
    claim: str
    value: float
    bound: float
    tolerance: float
    passed: bool


def _sym(m):
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.shape[0] != m.shape[1]:
        raise ValidationError(f"matrix is not square: {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("non-finite matrix entries")
    scale = max(1.0, float(np.linalg.norm(m, 2)))
    if np.abs(m - m.T).max() > 1e-12 * scale:
        raise ValidationError("matrix is not symmetric")
    return 0.5 * (m + m.T)


def _psd_report(claim, m, rtol=DEFAULT_RTOL) -> PsdCheckReport:
    m = 0.5 * (m + m.T)
    vals, vecs = np.linalg.eigh(m)
    tol = rtol * max(1.0, float(np.abs(vals).max()))
    min_eig = float(vals[0])
    passed = min_eig >= -tol
    return PsdCheckReport(
        claim=claim,
        min_eigenvalue=min_eig,
        tolerance=tol,
        passed=passed,
        witness=None if passed else vecs[:, 0].copy(),
    )


def _require_psd(m, what, rtol=DEFAULT_RTOL):
    m = _sym(m)
    vals = np.linalg.eigvalsh(m)
    scale = max(1.0, float(np.abs(vals).max()))
    if float(vals.min()) < -rtol * scale:
        raise ValidationError(f"{what} is not positive semidefinite")
    return m

def _require_pd(m, what, rtol=1e-10):
    m = _sym(m)
    vals = np.linalg.eigvalsh(m)
    scale = max(1.0, float(np.abs(vals).max()))
    if float(vals.min()) <= rtol * scale:
        raise ValidationError(f"{what} is not positive definite")
    return m


def random_psd(n: int, seed: int, spectrum=None):
    """Seeded random PSD matrix, either C C^T from a Gaussian factor or a
    random orthogonal conjugation of a given nonnegative spectrum."""
    if n < 1:
        raise ValidationError(f"dimension must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    if spectrum is None:
        c = rng.standard_normal((n, n))
        return c @ c.T
    spectrum = np.asarray(spectrum, dtype=float).ravel()
    if spectrum.shape[0] != n:
        raise ValidationError(f"spectrum has length {spectrum.shape[0]}, expected {n}")
    if np.any(spectrum < 0):
        raise ValidationError("requested PSD spectrum has negative entries")
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (q * spectrum) @ q.T


def random_correlation(n: int, seed: int):
    """Random correlation matrix: a random PD matrix rescaled to unit
    diagonal (D^-1/2 A D^-1/2)."""
    a = random_psd(n, seed) + 1e-6 * np.eye(n)
    d = 1.0 / np.sqrt(np.diag(a))
    r = a * np.outer(d, d)
    np.fill_diagonal(r, 1.0)
    return r


def check_block_replication(a) -> PsdCheckReport:
    """[[A, A], [A, A]] is PSD for PSD A."""
    a = _require_psd(a, "A")
    block = np.block([[a, a], [a, a]])
    return _psd_report("block_replication", block)


def check_block_inverse(a) -> PsdCheckReport:
    """[[A, I], [I, A^-1]] is PSD for PD A."""
    a = _require_pd(a, "A")
    eye = np.eye(a.shape[0])
    block = np.block([[a, eye], [eye, np.linalg.inv(a)]])
    return _psd_report("block_inverse", block)


def check_schur_product(a, b) -> PsdCheckReport:
    """The Hadamard product of PSD matrices is PSD."""
    a = _require_psd(a, "A")
    b = _require_psd(b, "B")
    if a.shape != b.shape:
        raise ValidationError(f"shape mismatch: {a.shape} vs {b.shape}")
    return _psd_report("schur_product", a * b)


def check_schur_complement_equivalence(a, b, d, rtol=DEFAULT_RTOL) -> SchurEquivalenceReport:
    """Block PSD-ness of [[A, D], [D^T, B]] is equivalent to either Schur
    complement being PSD; the three verdicts must agree."""
    a = _require_pd(a, "A")
    b = _require_pd(b, "B")
    d = np.atleast_2d(np.asarray(d, dtype=float))
    if d.shape != (a.shape[0], b.shape[0]):
        raise ValidationError(
            f"D has shape {d.shape}, expected ({a.shape[0]}, {b.shape[0]})"
        )
    block = np.block([[a, d], [d.T, b]])
    in_b = b - d.T @ np.linalg.solve(a, d)
    in_a = a - d @ np.linalg.solve(b, d.T)

    margins = []
    truths = []
    for m in (block, in_b, in_a):
        vals = np.linalg.eigvalsh(0.5 * (m + m.T))
        tol = rtol * max(1.0, float(np.abs(vals).max()))
        margins.append(float(vals.min()))
        truths.append(bool(vals.min() >= -tol))
    return SchurEquivalenceReport(
        block_psd=truths[0],
        complement_in_b=truths[1],
        complement_in_a=truths[2],
        margins=tuple(margins),
        agree=truths[0] == truths[1] == truths[2],
    )


def check_hadamard_inverse_bound(a, b) -> PsdCheckReport:
    """A∘B^-1 dominates Diag(A) (A∘B)^-1 Diag(A) for PD A, B."""
    a = _require_pd(a, "A")
    b = _require_pd(b, "B")
    if a.shape != b.shape:
        raise ValidationError(f"shape mismatch: {a.shape} vs {b.shape}")
    had = a * b
    if np.linalg.cond(had) > 1e14:
        raise ValidationError("Hadamard product is numerically singular")
    diag_a = np.diag(np.diag(a))
    diff = a * np.linalg.inv(b) - diag_a @ np.linalg.inv(had) @ diag_a
    return _psd_report("hadamard_inverse_bound", diff)


def check_diag_quadratic_bound(a) -> ScalarBoundReport:
    """diag(A)^T (A∘A)^-1 diag(A) is at most the dimension, for PD A;
    diagonal A attains it with equality."""
    a = _require_pd(a, "A")
    n = a.shape[0]
    had = a * a
    if np.linalg.cond(had) > 1e14:
        raise ValidationError("Hadamard square is numerically singular")
    d = np.diag(a)
    value = float(d @ np.linalg.solve(had, d))
    tol = DEFAULT_RTOL * n
    return ScalarBoundReport(
        claim="diag_quadratic_bound",
        value=value,
        bound=float(n),
        tolerance=tol,
        passed=value <= n + tol,
    )


def check_hadamard_square_diag_outer(a) -> PsdCheckReport:
    """A∘A dominates diag(A) diag(A)^T / n for PSD A (semidefinite inputs
    included via the continuity limit)."""
    a = _require_psd(a, "A")
    n = a.shape[0]
    d = np.diag(a)
    diff = a * a - np.outer(d, d) / n
    return _psd_report("hadamard_square_diag_outer", diff)


def check_correlation_hadamard_bound(r) -> PsdCheckReport:
    """R∘R^-1 + I dominates 2 (R∘R)^-1 for a PD correlation matrix R."""
    r = _require_pd(r, "R")
    if np.abs(np.diag(r) - 1.0).max() > 1e-12:
        raise ValidationError("matrix does not have a unit diagonal")
    n = r.shape[0]
    diff = r * np.linalg.inv(r) + np.eye(n) - 2.0 * np.linalg.inv(r * r)
    return _psd_report("correlation_hadamard_bound", diff)


def check_outer_moment_dominance(samples) -> PsdCheckReport:
    """The empirical second moment dominates the outer product of the
    empirical mean (expectation preserves positive semidefiniteness)."""
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    mean = x.mean(axis=0)
    second = x.T @ x / x.shape[0]
    return _psd_report("second_moment_dominates_mean_outer", second - np.outer(mean, mean), rtol=1e-10)


def hadamard_inverse_row_sum(a) -> ScalarBoundReport:
    """1^T (A∘A^-1) 1 equals the dimension for PD A, to relative 1e-9."""
    a = _require_pd(a, "A")
    n = a.shape[0]
    value = float(np.sum(a * np.linalg.inv(a)))
    tol = DEFAULT_RTOL * n
    return ScalarBoundReport(
        claim="hadamard_inverse_row_sum",
        value=value,
        bound=float(n),
        tolerance=tol,
        passed=abs(value - n) <= tol,
    )


CLAIMS = (
    "block_replication",
    "block_inverse",
    "schur_product",
    "schur_complement_equivalence",
    "hadamard_inverse_bound",
    "diag_quadratic_bound",
    "hadamard_square_diag_outer",
    "correlation_hadamard_bound",
    "hadamard_inverse_row_sum",
)


def _trial_margin(claim, n, seed):
    """One randomized trial; returns a signed margin where pass means
    margin >= -(relative tolerance)."""
    base = seed * 31 + n
    if claim == "block_replication":
        rep = check_block_replication(random_psd(n, base))
        return rep.min_eigenvalue, rep.tolerance, rep.passed
    if claim == "block_inverse":
        rep = check_block_inverse(random_psd(n, base) + 0.1 * np.eye(n))
        return rep.min_eigenvalue, rep.tolerance, rep.passed
    if claim == "schur_product":
        rep = check_schur_product(random_psd(n, base), random_psd(n, base + 1))
        return rep.min_eigenvalue, rep.tolerance, rep.passed
    if claim == "schur_complement_equivalence":
        rng = np.random.default_rng(base)
        a = random_psd(n, base) + 0.1 * np.eye(n)
        m = int(rng.integers(1, n + 1))
        b = random_psd(m, base + 1) + 0.1 * np.eye(m)
        d = rng.standard_normal((n, m))
        rep = check_schur_complement_equivalence(a, b, d)
        return (1.0 if rep.agree else -1.0), 0.0, rep.agree
    if claim == "hadamard_inverse_bound":
        rep = check_hadamard_inverse_bound(
            random_psd(n, base) + 0.1 * np.eye(n), random_psd(n, base + 1) + 0.1 * np.eye(n)
        )
        return rep.min_eigenvalue, rep.tolerance, rep.passed
    if claim == "diag_quadratic_bound":
        rep = check_diag_quadratic_bound(random_psd(n, base) + 0.1 * np.eye(n))
        return rep.bound - rep.value, rep.tolerance, rep.passed
    if claim == "hadamard_square_diag_outer":
        rng = np.random.default_rng(base)
        kind = int(rng.integers(3))
        if kind == 0:
            a = random_psd(n, base)
        elif kind == 1:
            v = rng.standard_normal(n)
            a = np.outer(v, v)  # exact rank one
        else:
            zeros = min(n - 1, 2)
            eigs = np.concatenate([rng.uniform(0.1, 3.0, n - zeros), np.zeros(zeros)])
            a = random_psd(n, base, spectrum=eigs)
        rep = check_hadamard_square_diag_outer(a)
        return rep.min_eigenvalue, rep.tolerance, rep.passed
    if claim == "correlation_hadamard_bound":
        rep = check_correlation_hadamard_bound(random_correlation(n, base))
        return rep.min_eigenvalue, rep.tolerance, rep.passed
    if claim == "hadamard_inverse_row_sum":
        rep = hadamard_inverse_row_sum(random_psd(n, base) + 0.1 * np.eye(n))
        return -abs(rep.value - rep.bound), rep.tolerance, rep.passed
    raise ValidationError(f"unknown claim: {claim!r}")


def verify_claims(trials: int = 1000, seed: int = 42, max_dim: int = 8, claims=CLAIMS):
    """Run every claim over seeded random instances of sizes 1..max_dim.

    Returns one summary dict per claim: {claim, trials, min_margin, pass}.
    min_margin is the worst signed eigenvalue (or bound slack) seen, and
    pass requires every trial to hold within its relative tolerance.
    """
    results = []
    for claim in claims:
        min_margin = np.inf
        all_passed = True
        for t in range(trials):
            n = 1 + (t % max_dim)
            margin, _tol, ok = _trial_margin(claim, n, seed + t)
            min_margin = min(min_margin, margin)
            all_passed = all_passed and ok
        results.append(
            {
                "claim": claim,
                "trials": trials,
                "min_margin": float(min_margin),
                "pass": bool(all_passed),
            }
        )
    return results

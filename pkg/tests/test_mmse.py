"""Posterior-moment and averaged-MMSE tests, anchored to scalar oracles."""

import numpy as np
import pytest
from scipy import integrate as scipy_integrate

from entpow import (
    IntegratorConfig,
    conditional_moments,
    diagonal_model,
    mmse_matrix,
    posterior_responsibilities,
    validate_constellation,
)
from entpow.inequalities import check_outer_moment_dominance
from entpow.constellation import sample_outputs

from conftest import random_constellation, random_lambda

SIGMOID = lambda x: 1.0 / (1.0 + np.exp(-x))

# oracle: E over the observation law of the posterior variance for equal-prob
# antipodal atoms, by adaptive quadrature, cross-checked below against MC
def bpsk_mmse_oracle(lam):
    s = np.sqrt(lam)

    def f_y(y):
        return 0.5 * (
            np.exp(-0.5 * (y - s) ** 2) + np.exp(-0.5 * (y + s) ** 2)
        ) / np.sqrt(2 * np.pi)

    val, err = scipy_integrate.quad(
        lambda y: f_y(y) * (1.0 - np.tanh(s * y) ** 2), -30, 30, epsabs=1e-13, epsrel=1e-13
    )
    assert err < 1e-10
    return val


class TestResponsibilities:
    def test_single_atom(self):
        con = validate_constellation([[0.2, 0.3]], [1.0])
        model = diagonal_model(con, [1.0, 1.0])
        r = posterior_responsibilities(model, [5.0, -4.0])
        assert r == pytest.approx([1.0], abs=0)

    def test_bpsk_midpoint(self, bpsk):
        model = diagonal_model(bpsk, [1.0])
        assert np.allclose(posterior_responsibilities(model, [0.0]), [0.5, 0.5], atol=1e-15)

    def test_bpsk_logistic_form(self, bpsk):
        model = diagonal_model(bpsk, [1.0])
        r = posterior_responsibilities(model, [1.0])
        assert r[0] == pytest.approx(SIGMOID(2.0), abs=1e-12)
        assert r[1] == pytest.approx(SIGMOID(-2.0), abs=1e-12)

    def test_sum_to_one(self):
        for seed in range(8):
            con = random_constellation(seed)
            model = diagonal_model(con, random_lambda(seed, con.dimension))
            rng = np.random.default_rng(seed)
            y = rng.normal(scale=3.0, size=con.dimension)
            r = posterior_responsibilities(model, y)
            assert abs(r.sum() - 1.0) <= 1e-12
            assert np.all(r >= 0)


class TestConditionalMoments:
    def test_deterministic_signal(self):
        x0 = np.array([0.4, -1.1])
        con = validate_constellation([x0], [1.0])
        model = diagonal_model(con, [2.0, 0.3])
        cm = conditional_moments(model, [0.0, 0.0])
        assert np.allclose(cm.cond_mean, x0, atol=0)
        assert np.allclose(cm.phi, 0.0, atol=1e-15)

    def test_bpsk_midpoint(self, bpsk):
        model = diagonal_model(bpsk, [1.0])
        cm = conditional_moments(model, [0.0])
        assert cm.cond_mean[0] == pytest.approx(0.0, abs=1e-15)
        assert cm.phi[0, 0] == pytest.approx(1.0, abs=1e-15)

    def test_bpsk_tanh_posterior(self, bpsk):
        model = diagonal_model(bpsk, [1.0])
        cm = conditional_moments(model, [1.0])
        assert cm.cond_mean[0] == pytest.approx(np.tanh(1.0), abs=1e-12)
        assert cm.phi[0, 0] == pytest.approx(1.0 - np.tanh(1.0) ** 2, abs=1e-12)

    def test_phi_is_centered_second_moment(self):
        for seed in range(6):
            con = random_constellation(seed + 300)
            model = diagonal_model(con, random_lambda(seed + 300, con.dimension))
            y = np.random.default_rng(seed).normal(size=con.dimension)
            cm = conditional_moments(model, y)
            rebuilt = cm.cond_second_moment - np.outer(cm.cond_mean, cm.cond_mean)
            assert np.allclose(cm.phi, rebuilt, atol=1e-14)
            assert np.allclose(cm.phi, cm.phi.T, atol=1e-14)

    def test_phi_is_psd(self):
        for seed in range(6):
            con = random_constellation(seed + 350)
            model = diagonal_model(con, random_lambda(seed + 350, con.dimension))
            ys = np.random.default_rng(seed).normal(scale=2.0, size=(25, con.dimension))
            phis = conditional_moments(model, ys).phi
            for phi in phis:
                scale = max(1.0, np.linalg.norm(phi, 2))
                assert np.linalg.eigvalsh(phi).min() >= -1e-10 * scale


class TestMmseMatrix:
    def test_deterministic_is_zero(self, quad_cfg):
        con = validate_constellation([[0.7]], [1.0])
        summary = mmse_matrix(diagonal_model(con, [1.0]), quad_cfg)
        assert summary.e_matrix[0, 0] == pytest.approx(0.0, abs=1e-14)

    def test_bpsk_no_information(self, bpsk, quad_cfg):
        # at zero power the observation is independent of the signal, so the
        # averaged posterior variance is the prior variance
        summary = mmse_matrix(diagonal_model(bpsk, [0.0]), quad_cfg)
        assert summary.e_matrix[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_bpsk_unit_power_oracle(self, bpsk, quad_cfg):
        oracle = bpsk_mmse_oracle(1.0)
        assert oracle == pytest.approx(0.44959950920667285, abs=1e-10)  # frozen
        summary = mmse_matrix(diagonal_model(bpsk, [1.0]), quad_cfg)
        assert summary.e_matrix[0, 0] == pytest.approx(oracle, abs=1e-6)
        assert summary.diag_e[0] == summary.e_matrix[0, 0]

    def test_bpsk_monte_carlo_cross_check(self, bpsk):
        cfg = IntegratorConfig(method="monte_carlo", samples=1_000_000, seed=42)
        summary = mmse_matrix(diagonal_model(bpsk, [1.0]), cfg)
        se = summary.integration_error[0, 0]
        assert abs(summary.e_matrix[0, 0] - 0.44959950920667285) <= 4 * se

    def test_quadrature_and_mc_agree(self):
        for seed in (0, 1):
            con = random_constellation(seed, n=2)
            lam = random_lambda(seed, 2)
            q = mmse_matrix(diagonal_model(con, lam), IntegratorConfig(order=48))
            m = mmse_matrix(
                diagonal_model(con, lam),
                IntegratorConfig(method="monte_carlo", samples=400_000, seed=seed),
            )
            combined = q.integration_error + m.integration_error + 1e-12
            assert np.all(np.abs(q.e_matrix - m.e_matrix) <= 4 * combined), f"seed={seed}"

    def test_dominated_by_prior_covariance(self, quad_cfg):
        # total-variance: averaging the posterior covariance can only lose
        # spread relative to the prior
        for seed in range(5):
            con = random_constellation(seed + 500)
            lam = random_lambda(seed + 500, con.dimension)
            summary = mmse_matrix(diagonal_model(con, lam), quad_cfg)
            gap = con.prior_cov() - summary.e_matrix
            tol = 3.0 * summary.integration_error.max() + 1e-12
            assert np.linalg.eigvalsh(0.5 * (gap + gap.T)).min() >= -tol, f"seed={seed}"

    def test_bpsk_monotone_in_power(self, bpsk, quad_cfg):
        values = [
            mmse_matrix(diagonal_model(bpsk, [lam]), quad_cfg).e_matrix[0, 0]
            for lam in (0.0, 0.5, 1.0, 2.0, 4.0)
        ]
        assert all(a >= b - 1e-10 for a, b in zip(values, values[1:])), values

    def test_error_reported_and_symmetric(self, quad_cfg):
        con = random_constellation(7, n=2)
        summary = mmse_matrix(diagonal_model(con, [0.5, 1.5]), quad_cfg)
        assert summary.integration_error.shape == (2, 2)
        assert np.all(summary.integration_error >= 0)
        assert np.allclose(summary.e_matrix, summary.e_matrix.T, atol=1e-14)


class TestExpectationPreservesPsd:
    def test_posterior_mean_samples(self, quad_cfg):
        con = random_constellation(11, n=2, k=5)
        model = diagonal_model(con, [1.0, 0.5])
        ys = sample_outputs(model, 500, seed=3)
        means = conditional_moments(model, ys).cond_mean
        assert check_outer_moment_dominance(means).passed

    def test_raw_constellation_atoms(self):
        for seed in range(10):
            con = random_constellation(seed + 900)
            rng = np.random.default_rng(seed)
            draws = con.points[rng.choice(con.size, size=400, p=con.probs)]
            assert check_outer_moment_dominance(draws).passed

import numpy as np
import pytest

from garchdiag import (
    GarchParams,
    ParameterSpace,
    c_coefficients,
    estimate_psi,
    grad_log_sigma2,
    residuals,
    sigma2_hat_path,
    simulate,
)
from garchdiag.errors import BetaSumAtLeastOne, SeriesTooShort, StepTooLarge

GARCH11 = GarchParams(0.0002, (0.1,), (0.7,))


def brute_force_sigma2(theta, x):
    """Independent oracle: the truncated variance sum evaluated term by term."""
    x = np.asarray(x, dtype=float)
    n = len(x) - 1
    c = c_coefficients(theta, n).c
    out = np.empty(n)
    for t in range(1, n + 1):
        acc = c[0]
        for i in range(1, t + 1):
            acc += c[i] * x[t - i] ** 2
        out[t - 1] = acc
    return out


class TestCoefficients:
    def test_garch11_hand_values(self):
        cv = c_coefficients(GARCH11, 3)
        assert np.allclose(cv.c, [0.00066667, 0.1, 0.07, 0.049], atol=5e-9)

    def test_garch21_hand_values(self):
        theta = GarchParams(0.1, (0.2, 0.1), (0.5,))
        cv = c_coefficients(theta, 3)
        assert np.allclose(cv.c, [0.2, 0.2, 0.2, 0.1], rtol=1e-14)

    def test_m_zero(self):
        cv = c_coefficients(GARCH11, 0)
        assert cv.c.shape == (1,)
        assert cv.c[0] == pytest.approx(0.0002 / 0.3)

    def test_beta_sum_at_least_one(self):
        with pytest.raises(BetaSumAtLeastOne):
            c_coefficients(GarchParams(0.1, (0.1,), (0.6, 0.4)), 5)

    def test_garch11_closed_form(self):
        # c_i = alpha1 * beta1^(i-1) for i >= 1
        cv = c_coefficients(GARCH11, 60)
        expected = 0.1 * 0.7 ** np.arange(60)
        assert np.allclose(cv.c[1:], expected, rtol=1e-12)

    def test_linear_recursion_holds_past_r(self, rng):
        for _ in range(25):
            p = rng.integers(1, 4)
            q = rng.integers(1, 4)
            alpha = rng.uniform(0.0, 0.2, p)
            beta = rng.uniform(0.0, 0.7 / q, q)
            theta = GarchParams(rng.uniform(1e-4, 0.5), tuple(alpha), tuple(beta))
            m = 30
            c = c_coefficients(theta, m).c
            r = max(p, q)
            for i in range(r + 1, m + 1):
                lagged = sum(beta[j] * c[i - 1 - j] for j in range(q))
                assert c[i] == pytest.approx(lagged, abs=1e-15 + 1e-12 * c.max())

    def test_nonnegative_and_positive_head(self, rng):
        for _ in range(10):
            theta = GarchParams(rng.uniform(1e-4, 1.0),
                                tuple(rng.uniform(0, 0.3, 2)),
                                tuple(rng.uniform(0, 0.3, 2)))
            c = c_coefficients(theta, 40).c
            assert c[0] > 0.0
            assert (c >= 0.0).all()


class TestSigma2Path:
    def test_hand_values(self):
        x = np.array([0.01, 0.02, 0.03])
        s2 = sigma2_hat_path(GARCH11, x)
        assert s2[0] == pytest.approx(0.00067667, abs=5e-9)
        assert s2[1] == pytest.approx(0.00071367, abs=5e-9)

    def test_zero_lags_give_c0(self):
        s2 = sigma2_hat_path(GARCH11, np.zeros(10))
        assert np.allclose(s2, 0.0002 / 0.3, rtol=1e-15)

    def test_floor_at_c0(self, rng):
        x = rng.standard_normal(200) * 0.05
        s2 = sigma2_hat_path(GARCH11, x)
        assert (s2 >= 0.0002 / 0.3).all()

    def test_matches_brute_force(self, rng):
        for _ in range(5):
            p = rng.integers(1, 3)
            q = rng.integers(1, 3)
            theta = GarchParams(rng.uniform(0.01, 0.5),
                                tuple(rng.uniform(0, 0.25, p)),
                                tuple(rng.uniform(0, 0.6 / q, q)))
            x = rng.standard_normal(41)
            assert np.allclose(sigma2_hat_path(theta, x),
                               brute_force_sigma2(theta, x), rtol=1e-13)

    def test_truncated_path_matches_simulation_recursion(self, table_theta,
                                                         normal_spec):
        # with enough observed history the truncated representation recovers
        # the recursion-generated variances
        path = simulate(table_theta, normal_spec, 2000, burn_in=2000, seed=77)
        s2 = sigma2_hat_path(table_theta, path.x)
        rel = np.abs(s2[300:] / path.sigma2[301:] - 1.0)
        assert rel.max() < 1e-6


class TestResiduals:
    def test_hand_values(self):
        res = residuals(GARCH11, np.array([0.01, 0.02, 0.03]))
        assert res.eps_hat[0] == pytest.approx(0.76886, abs=2e-5)
        assert res.eps_hat[1] == pytest.approx(1.12297, abs=2e-5)

    def test_zero_observation_gives_zero_residual(self):
        res = residuals(GARCH11, np.array([0.01, 0.0, 0.03]))
        assert res.eps_hat[0] == 0.0

    def test_pure_function(self, medium_path, table_theta):
        a = residuals(table_theta, medium_path.x)
        b = residuals(table_theta, medium_path.x)
        assert np.array_equal(a.eps_hat, b.eps_hat)

    def test_recovers_true_innovations(self, table_theta, normal_spec):
        # knowing theta, residuals track the stored innovations once the
        # truncation error has decayed
        path = simulate(table_theta, normal_spec, 2000, burn_in=2000, seed=78)
        res = residuals(table_theta, path.x)
        gap = np.abs(res.eps_hat[200:] - path.eps[201:])
        assert gap.max() < 1e-3

    def test_too_short(self):
        with pytest.raises(SeriesTooShort):
            sigma2_hat_path(GARCH11, np.array([0.1]))


class TestGradient:
    def test_zero_lag_closed_form(self):
        # with all lags zero, sigma_hat^2 = c0 and the gradient of log c0 is
        # (1/alpha0, 0, 1/(1-beta1))
        g = grad_log_sigma2(GARCH11, np.zeros(12), t=6)
        assert g[0] == pytest.approx(5000.0, rel=1e-3)
        assert g[1] == pytest.approx(0.0, abs=1e-3)
        assert g[2] == pytest.approx(1.0 / 0.3, rel=1e-3)

    def test_central_difference_order(self):
        # halving the step shrinks the error about fourfold on the zero-lag
        # closed form (beta coordinate)
        x = np.zeros(8)
        exact = 1.0 / 0.3
        e1 = abs(grad_log_sigma2(GARCH11, x, 3, step=1e-3)[2] - exact)
        e2 = abs(grad_log_sigma2(GARCH11, x, 3, step=5e-4)[2] - exact)
        assert e2 < e1
        assert e1 / e2 == pytest.approx(4.0, rel=0.5)

    def test_beta_gradient_free_of_scale(self):
        x = np.zeros(10)
        g1 = grad_log_sigma2(GARCH11, x, 5)
        scaled = GarchParams(GARCH11.alpha0 * 25.0, GARCH11.alpha, GARCH11.beta)
        g2 = grad_log_sigma2(scaled, x, 5)
        assert g1[2] == pytest.approx(g2[2], rel=1e-9)

    def test_step_too_large(self):
        space = ParameterSpace(rho0=0.999, lower=1.9e-4, upper=10.0)
        with pytest.raises(StepTooLarge):
            grad_log_sigma2(GARCH11, np.zeros(10), 5, step=0.1, space=space)

    def test_bad_t(self):
        with pytest.raises(ValueError):
            grad_log_sigma2(GARCH11, np.zeros(10), t=0)


class TestPsi:
    def test_zero_lag_exact_average(self):
        est = estimate_psi(GARCH11, np.zeros(201))
        assert est.n_used == 100
        assert est.psi[0] == pytest.approx(5000.0, rel=1e-3)
        assert est.psi[2] == pytest.approx(1.0 / 0.3, rel=1e-3)

    def test_too_short(self):
        with pytest.raises(SeriesTooShort):
            estimate_psi(GARCH11, np.zeros(100))

    def test_two_paths_agree(self, table_theta, normal_spec):
        a = simulate(table_theta, normal_spec, 100_000, burn_in=1000, seed=21)
        b = simulate(table_theta, normal_spec, 100_000, burn_in=1000, seed=22)
        psi_a = estimate_psi(table_theta, a.x).psi
        psi_b = estimate_psi(table_theta, b.x).psi
        assert np.all(np.abs(psi_a - psi_b) <= 0.05 * np.abs(psi_a))

    def test_alpha0_coordinate_positive(self, medium_path, table_theta):
        est = estimate_psi(table_theta, medium_path.x)
        assert est.psi[0] > 0.0

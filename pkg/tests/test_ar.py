import math

import numpy as np
import pytest

from samossa import (
    ArModel,
    DegenerateRootsError,
    FitError,
    NonStationaryError,
    ShapeError,
)
from samossa.ar import characteristic_roots, companion_matrix, diagnostics, fit_ar, forecast_ar


def simulate_ar(alpha, eta):
    """Reference simulation of the recursion from a zero initial state."""
    p = len(alpha)
    x = np.zeros(len(eta))
    for t in range(len(eta)):
        acc = eta[t]
        for i in range(1, p + 1):
            if t - i >= 0:
                acc += alpha[i - 1] * x[t - i]
        x[t] = acc
    return x


class TestFitAr:
    def test_exact_recursion(self):
        x = np.empty(200)
        x[0] = 1.0
        for t in range(1, 200):
            x[t] = 0.8 * x[t - 1]
        model = fit_ar(x, 1)
        assert model.alpha[0] == pytest.approx(0.8, abs=1e-12)
        assert model.noise_var_hat < 1e-20

    def test_white_noise_concentrates_at_zero(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=100_000)
        model = fit_ar(x, 1)
        assert abs(model.alpha[0]) < 0.02

    def test_matches_normal_equations(self):
        # Closed-form oracle on a well-conditioned design.
        rng = np.random.default_rng(5)
        eta = rng.normal(size=5000)
        x = simulate_ar([1.2, -0.4], eta)
        model = fit_ar(x, 2)
        T = len(x)
        design = np.column_stack([x[1:T - 1], x[0:T - 2]])
        targets = x[2:]
        gram = design.T @ design
        assert np.linalg.cond(gram) < 1e8
        oracle = np.linalg.solve(gram, design.T @ targets)
        np.testing.assert_allclose(model.alpha, oracle, atol=1e-8)

    def test_too_short(self):
        with pytest.raises(FitError):
            fit_ar(np.ones(4), 2)

    def test_rank_deficient_flagged(self):
        model = fit_ar(np.zeros(50), 2)
        assert model.rank_deficient
        assert np.all(model.alpha == 0.0)

    def test_identification_rate(self):
        # Squared coefficient error on clean AR data shrinks roughly like 1/T.
        rng_master = np.random.default_rng(17)
        alpha = np.array([0.45, -0.045])
        t_values = (1000, 10_000, 100_000)
        medians = []
        for T in t_values:
            errs = []
            for _ in range(10):
                eta = rng_master.normal(size=T) * 0.5
                x = simulate_ar(alpha, eta)
                model = fit_ar(x, 2)
                errs.append(np.sum((model.alpha - alpha) ** 2))
            medians.append(np.median(errs))
        slope = np.polyfit(np.log(t_values), np.log(medians), 1)[0]
        assert -1.3 <= slope <= -0.7


class TestForecastAr:
    def test_single_lag(self):
        model = ArModel(alpha=np.array([0.5]), p=1, noise_var_hat=1.0)
        assert forecast_ar(model, [2.0]) == pytest.approx(1.0)

    def test_zero_model(self):
        model = ArModel(alpha=np.zeros(3), p=3, noise_var_hat=1.0)
        assert forecast_ar(model, [4.0, 5.0, 6.0]) == 0.0

    def test_two_lags(self):
        model = ArModel(alpha=np.array([1.5, -0.56]), p=2, noise_var_hat=1.0)
        assert forecast_ar(model, [1.0, 1.0]) == pytest.approx(0.94)

    def test_order_zero(self):
        assert forecast_ar(ArModel.zero(), []) == 0.0

    def test_lag_count_mismatch(self):
        model = ArModel(alpha=np.array([0.5]), p=1, noise_var_hat=1.0)
        with pytest.raises(ShapeError):
            forecast_ar(model, [1.0, 2.0])


class TestRoots:
    def test_linear(self):
        roots = characteristic_roots([0.5])
        assert roots.tolist() == [0.5]

    def test_distinct_real_pair(self):
        roots = characteristic_roots([1.5, -0.56])
        np.testing.assert_allclose(sorted(np.real(roots), reverse=True), [0.8, 0.7], atol=1e-12)

    def test_imaginary_pair(self):
        roots = characteristic_roots([0.0, -0.25])
        assert sorted(np.round(np.imag(roots), 12).tolist()) == [-0.5, 0.5]
        assert np.max(np.abs(roots)) == pytest.approx(0.5)

    def test_companion_layout(self):
        A = companion_matrix([1.5, -0.56, 0.1])
        np.testing.assert_array_equal(A[0], [1.5, -0.56, 0.1])
        np.testing.assert_array_equal(A[1:, :-1], np.eye(2))
        np.testing.assert_array_equal(A[1:, -1], [0.0, 0.0])


class TestDiagnostics:
    def test_ar1_closed_forms(self):
        model = ArModel(alpha=np.array([0.5]), p=1, noise_var_hat=1.0)
        diag = diagnostics(model, sigma=1.0)
        assert diag.c_lambda == pytest.approx(1.0)
        assert diag.sigma_x == pytest.approx(2.0)
        assert diag.gramian_psi[0, 0] == pytest.approx(1.0 / 0.75, abs=1e-10)

    def test_partial_fractions_and_ma_head(self):
        # Roots 0.8, 0.7: a = (8, -7), c_lambda = 15, and the unrolled
        # second MA weight equals 8*0.8 - 7*0.7 = alpha_1.
        model = ArModel(alpha=np.array([1.5, -0.56]), p=2, noise_var_hat=1.0)
        diag = diagnostics(model, sigma=1.0)
        assert diag.c_lambda == pytest.approx(15.0, abs=1e-9)
        assert diag.ma_coeffs[0] == 1.0
        assert diag.ma_coeffs[1] == model.alpha[0]
        assert diag.ma_coeffs[1] == pytest.approx(8 * 0.8 - 7 * 0.7)

    def test_ma_coeffs_match_root_formula(self):
        # Independent oracle: beta_k = sum_i a_i lambda_i^k from the roots.
        alpha = np.array([1.1, -0.3])
        model = ArModel(alpha=alpha, p=2, noise_var_hat=1.0)
        diag = diagnostics(model, sigma=1.0, K=30)
        roots = np.roots([1.0, -alpha[0], -alpha[1]])
        a = np.array([
            1.0 / np.prod([1 - roots[j] / roots[i] for j in range(2) if j != i])
            for i in range(2)
        ])
        for k in range(30):
            expected = np.real(np.sum(a * roots**k))
            assert diag.ma_coeffs[k] == pytest.approx(expected, abs=1e-12)

    def test_lyapunov_fixed_point(self):
        model = ArModel(alpha=np.array([1.5, -0.56]), p=2, noise_var_hat=0.25)
        diag = diagnostics(model)
        A = diag.companion
        B = np.array([[1.0], [0.0]])
        np.testing.assert_allclose(
            diag.gramian_psi, A @ diag.gramian_psi @ A.T + B @ B.T, atol=1e-10
        )
        np.testing.assert_allclose(
            diag.gramian_gamma, A @ diag.gramian_gamma @ A.T + np.eye(2), atol=1e-10
        )

    def test_gramian_sandwich(self):
        for alpha in ([0.5], [1.5, -0.56], [0.2, 0.1, -0.02]):
            model = ArModel(alpha=np.array(alpha), p=len(alpha), noise_var_hat=1.0)
            diag = diagnostics(model)
            assert np.min(np.linalg.eigvalsh(diag.gramian_psi)) > 0.0
            gap = diag.gramian_gamma - diag.gramian_psi
            assert np.min(np.linalg.eigvalsh(gap)) >= -1e-10

    def test_nonstationary_rejected(self):
        model = ArModel(alpha=np.array([1.05]), p=1, noise_var_hat=1.0)
        with pytest.raises(NonStationaryError):
            diagnostics(model)

    def test_repeated_roots_rejected(self):
        # (z - 0.6)^2 = z^2 - 1.2 z + 0.36
        model = ArModel(alpha=np.array([1.2, -0.36]), p=2, noise_var_hat=1.0)
        with pytest.raises(DegenerateRootsError):
            diagnostics(model)

    def test_est_err_budget_reported(self):
        model = ArModel(alpha=np.array([0.5]), p=1, noise_var_hat=2.0)
        diag = diagnostics(model)
        expected = 2.0 * np.min(np.linalg.eigvalsh(diag.gramian_psi)) / 6.0
        assert diag.est_err_budget == pytest.approx(expected)


class TestMaArEquivalence:
    @pytest.mark.parametrize("lam", [0.3, 0.6, 0.95])
    def test_truncated_ma_matches_recursion(self, lam):
        from samossa.synth import ar_from_lambda_star

        K = 200
        alpha = ar_from_lambda_star(2, lam)
        model = ArModel(alpha=alpha, p=2, noise_var_hat=1.0)
        diag = diagnostics(model, sigma=1.0, K=K)
        rng = np.random.default_rng(23)
        eta = rng.normal(size=400)
        via_recursion = simulate_ar(alpha, eta)
        via_ma = np.convolve(eta, diag.ma_coeffs)[: len(eta)]
        # Sum of the omitted weights: sum_{k>=K} |beta_k| <= c * lam^K / (1-lam).
        bound = diag.c_lambda * lam**K / (1.0 - lam) * np.max(np.abs(eta))
        floor = 1e-11 * max(1.0, diag.sigma_x)  # float accumulation, not truncation
        assert np.max(np.abs(via_recursion - via_ma)) <= bound + floor

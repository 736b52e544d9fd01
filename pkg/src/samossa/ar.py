"""Per-series AR(p) identification, forecasting, and stationarity analysis.

Stage 2 of the pipeline: fit an autoregressive model to the residuals left
by the low-rank stage, by ordinary least squares on lagged values. The
analysis half of the module exposes the companion matrix, characteristic
roots, the controllability Gramian and its sibling, the moving-average
expansion of the process, and the sub-gaussian variance proxy built from
them; these quantities control identification accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRootsError, FitError, NonStationaryError, ShapeError

__all__ = [
    "ArModel",
    "ArDiagnostics",
    "fit_ar",
    "forecast_ar",
    "characteristic_roots",
    "companion_matrix",
    "diagnostics",
]

# Roots closer than this are treated as repeated (below eigensolver accuracy).
_ROOT_TOL = 1e-9

_LYAPUNOV_TOL = 1e-12


@dataclass(frozen=True)
class ArModel:
    """AR(p) coefficients, most-recent-lag first: x(t) ~ sum_i alpha[i-1] x(t-i).

    ``p == 0`` is the degenerate model whose one-step forecast is always 0
    (the pure low-rank ablation). ``rank_deficient`` flags a fit that fell
    back to the minimum-norm solution.
    """

    alpha: np.ndarray
    p: int
    noise_var_hat: float
    rank_deficient: bool = False

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64)
        if self.p < 0 or alpha.shape != (self.p,):
            raise ShapeError(f"alpha shape {alpha.shape} inconsistent with p={self.p}")
        if self.p > 0 and not np.all(np.isfinite(alpha)):
            raise FitError("non-finite AR coefficients")
        alpha = alpha.copy()
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def zero(cls, noise_var_hat: float = 0.0) -> "ArModel":
        return cls(alpha=np.zeros(0), p=0, noise_var_hat=noise_var_hat)


@dataclass(frozen=True)
class ArDiagnostics:
    """Stationarity analysis of a fitted AR(p) model.

    ``companion`` is the p x p transition matrix (coefficients on the first
    row, shifted identity below); ``roots`` its eigenvalues sorted by
    modulus, descending. ``gramian_psi`` solves Psi = A Psi A' + B B' and
    ``gramian_gamma`` solves Gamma = A Gamma A' + I. ``ma_coeffs`` are the
    leading weights of the moving-average expansion of the process.
    ``est_err_budget`` is the residual-quality level,
    sigma^2 lambda_min(Psi) / (6p), below which the identification-rate
    guarantee applies; it is reported for inspection only, never enforced.
    """

    companion: np.ndarray
    roots: np.ndarray
    lambda_star: float
    c_lambda: float
    sigma_x: float
    gramian_psi: np.ndarray
    gramian_gamma: np.ndarray
    ma_coeffs: np.ndarray
    est_err_budget: float


def fit_ar(residuals, p: int) -> ArModel:
    """Least-squares AR(p) fit to a residual series.

    Regresses x(t+1) on [x(t), ..., x(t-p+1)] over all admissible t. A
    rank-deficient design falls back to the minimum-norm solution and is
    flagged on the model. ``noise_var_hat`` is the mean squared regression
    residual.
    """
    x = np.asarray(residuals, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError("fit_ar expects a 1-D residual series")
    if p < 1:
        raise FitError(f"order must be >= 1, got {p} (use ArModel.zero() for p=0)")
    T = x.shape[0]
    if T < 2 * p + 1:
        raise FitError(f"need at least {2 * p + 1} observations for p={p}, got {T}")

    targets = x[p:]
    design = np.column_stack([x[p - i: T - i] for i in range(1, p + 1)])
    alpha, _, rank, _ = np.linalg.lstsq(design, targets, rcond=None)
    resid = targets - design @ alpha
    return ArModel(
        alpha=alpha,
        p=p,
        noise_var_hat=float(np.mean(resid**2)),
        rank_deficient=bool(rank < p),
    )


def forecast_ar(model: ArModel, recent_residuals) -> float:
    """One-step conditional-mean forecast from the last p residuals.

    ``recent_residuals`` is most-recent-first: [x(t-1), ..., x(t-p)].
    """
    lags = np.asarray(recent_residuals, dtype=np.float64)
    if lags.shape != (model.p,):
        raise ShapeError(f"expected {model.p} lagged residuals, got shape {lags.shape}")
    if model.p == 0:
        return 0.0
    return float(model.alpha @ lags)


def companion_matrix(alpha) -> np.ndarray:
    """p x p companion matrix: alpha on the first row, shifted identity below."""
    alpha = np.asarray(alpha, dtype=np.float64)
    p = alpha.shape[0]
    A = np.zeros((p, p))
    A[0, :] = alpha
    if p > 1:
        A[1:, :-1] = np.eye(p - 1)
    return A


def characteristic_roots(alpha) -> np.ndarray:
    """Roots of z^p - sum_i alpha_i z^(p-i), sorted by modulus descending.

    Computed as companion-matrix eigenvalues. The process is stationary iff
    all roots lie strictly inside the unit circle.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.ndim != 1 or alpha.shape[0] < 1:
        raise ShapeError("need a coefficient vector of length >= 1")
    roots = np.linalg.eigvals(companion_matrix(alpha))
    order = np.lexsort((-roots.imag, -roots.real, -np.abs(roots)))
    return roots[order]


def _solve_lyapunov(A: np.ndarray, Q: np.ndarray, lambda_star: float) -> np.ndarray:
    """Fixed point of X = A X A' + Q, iterated to 1e-12 in max-norm.

    The iterate contracts at rate lambda_star^2, so the cap
    10*log(1e-12)/log(lambda_star^2) leaves a wide margin.
    """
    if lambda_star < 1e-6:
        cap = 16
    else:
        cap = max(16, math.ceil(10.0 * math.log(_LYAPUNOV_TOL) / math.log(lambda_star**2)))
    X = Q.copy()
    for _ in range(cap):
        X_next = A @ X @ A.T + Q
        if np.max(np.abs(X_next - X)) <= _LYAPUNOV_TOL:
            return X_next
        X = X_next
    return X


def _ma_by_unrolling(alpha: np.ndarray, K: int) -> np.ndarray:
    # Unroll x(t) = sum alpha_i x(t-i) + eta(t) into weights on past eta:
    # beta_0 = 1 and beta_k = sum_{i<=min(k,p)} alpha_i beta_{k-i}, exactly.
    p = alpha.shape[0]
    beta = np.zeros(K)
    beta[0] = 1.0
    for k in range(1, K):
        m = min(k, p)
        beta[k] = float(alpha[:m] @ beta[k - m: k][::-1])
    return beta


def diagnostics(model: ArModel, sigma: float | None = None, K: int = 200) -> ArDiagnostics:
    """Stationarity diagnostics for a fitted AR model.

    ``sigma`` is the innovation standard deviation; defaults to the fitted
    sqrt(noise_var_hat). ``K`` is the number of moving-average coefficients
    to expand. Raises NonStationaryError when the dominant root modulus is
    >= 1, and DegenerateRootsError when two roots are closer than 1e-9 (the
    partial-fraction constants are then ill-defined).
    """
    if model.p < 1:
        raise ShapeError("diagnostics need a model of order >= 1")
    if sigma is None:
        sigma = math.sqrt(max(model.noise_var_hat, 0.0))
    A = companion_matrix(model.alpha)
    roots = characteristic_roots(model.alpha)
    lambda_star = float(np.abs(roots[0]))
    if lambda_star >= 1.0:
        raise NonStationaryError(f"dominant root modulus {lambda_star} >= 1")
    for i in range(model.p):
        for j in range(i + 1, model.p):
            if abs(roots[i] - roots[j]) < _ROOT_TOL:
                raise DegenerateRootsError(
                    f"roots {roots[i]} and {roots[j]} closer than {_ROOT_TOL}"
                )

    # Partial-fraction constants a_i = prod_{j != i} (1 - lambda_j/lambda_i)^-1.
    a = np.ones(model.p, dtype=np.complex128)
    for i in range(model.p):
        for j in range(model.p):
            if j != i:
                a[i] /= 1.0 - roots[j] / roots[i]
    c_lambda = float(np.sum(np.abs(a)))
    sigma_x = c_lambda * sigma / (1.0 - lambda_star)

    B = np.zeros((model.p, 1))
    B[0, 0] = 1.0
    psi = _solve_lyapunov(A, B @ B.T, lambda_star)
    gamma = _solve_lyapunov(A, np.eye(model.p), lambda_star)
    lam_min_psi = float(np.min(np.linalg.eigvalsh(psi)))

    return ArDiagnostics(
        companion=A,
        roots=roots,
        lambda_star=lambda_star,
        c_lambda=c_lambda,
        sigma_x=sigma_x,
        gramian_psi=psi,
        gramian_gamma=gamma,
        ma_coeffs=_ma_by_unrolling(model.alpha, K),
        est_err_budget=sigma**2 * lam_min_psi / (6.0 * model.p),
    )

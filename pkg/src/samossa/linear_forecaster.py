"""Linear forecaster for the smooth component.

The last row of a low-rank Page matrix is a fixed linear combination of the
rows above it. This module learns that combination by regressing the raw
last-row entries on the rank-truncated top L-1 rows, and applies it to
lagged raw observations to forecast one step ahead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FitError, ShapeError
from .lowrank import RankRule, select_rank, svd
from .pagemat import stack
from .panel import TimePanel

__all__ = ["BetaModel", "fit_beta", "forecast_f"]

# Relative singular value cutoff for the minimum-norm regression solve; the
# design matrix has rank <= k_hat < L-1 by construction, so the normal
# equations are singular and a pseudo-inverse is required.
_LSTSQ_RCOND = 1e-10


@dataclass(frozen=True)
class BetaModel:
    """Lag model for the smooth component.

    ``beta`` is most-recent-lag first: the forecast is
    sum_i beta[i-1] * y(t-i) over the last L-1 observations. ``resid_rms``
    is the in-sample RMS of the fitting regression.
    """

    beta: np.ndarray
    L: int
    k_hat: int
    resid_rms: float

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=np.float64)
        if beta.shape != (self.L - 1,):
            raise ShapeError(f"beta length {beta.shape[0]} != L-1 = {self.L - 1}")
        if not np.all(np.isfinite(beta)):
            raise FitError("non-finite regression coefficients")
        beta = beta.copy()
        beta.setflags(write=False)
        object.__setattr__(self, "beta", beta)


def fit_beta(panel: TimePanel, L: int, rule: RankRule, k_hat: int | None = None) -> BetaModel:
    """Fit the lag model on the stacked Page matrix of the observations.

    The features are the rank-truncated first L-1 rows (truncation of the
    sub-matrix, not rows of the full-matrix truncation, which keeps the
    features independent of the last-row noise); the targets are the raw
    last-row entries. ``k_hat`` overrides rank selection when the caller has
    already chosen a rank on the full matrix; otherwise the rule is applied
    to the full matrix's spectrum here. The regression is solved in the
    minimum-norm sense.
    """
    if L < 2:
        raise ShapeError(f"need L >= 2 to regress the last row on the rest, got L={L}")
    page = stack(panel, L)
    if k_hat is None:
        full = svd(page.data)
        k_hat = select_rank(full.singular_values, rule, shape=page.data.shape)

    sub = page.data[: L - 1, :]
    k_sub = min(k_hat, *sub.shape)
    sub_svd = svd(sub)
    if sub_svd.singular_values[0] <= 0.0:
        raise FitError("all-zero feature matrix")
    features = sub_svd.truncate(k_sub)

    targets = page.data[L - 1, :]
    coef, _, _, _ = np.linalg.lstsq(features.T, targets, rcond=_LSTSQ_RCOND)
    fitted = features.T @ coef
    rms = float(np.sqrt(np.mean((fitted - targets) ** 2)))
    # Page rows are oldest-first; flip so beta is most-recent-lag first.
    return BetaModel(beta=coef[::-1], L=L, k_hat=k_hat, resid_rms=rms)


def forecast_f(model: BetaModel, lags) -> float:
    """One-step forecast of the smooth component from raw lagged values.

    ``lags`` is most-recent-first: [y(t-1), y(t-2), ..., y(t-(L-1))].
    """
    lags = np.asarray(lags, dtype=np.float64)
    if lags.shape != (model.L - 1,):
        raise ShapeError(f"expected {model.L - 1} lags, got shape {lags.shape}")
    return float(model.beta @ lags)

"""Stage 1: low-rank estimation of the deterministic component.

Builds the stacked Page matrix of the observations, truncates it to the
selected rank, and reads the smooth component and the residuals back out of
the matrix cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .lowrank import RankRule, select_rank, svd
from .pagemat import stack
from .panel import TimePanel

__all__ = ["Decomposition", "decompose", "est_err"]


@dataclass(frozen=True)
class Decomposition:
    """Per-series estimates over the retained training window.

    ``f_hat`` and ``x_hat`` are N x T_eff; column j is time t0 + j where
    t0 = origin + first panel index. By construction f_hat + x_hat equals
    the retained observations exactly. ``balance`` is the spectra-balance
    diagnostic s_khat * sqrt(khat) / sqrt(N * T_eff) (reported only; no
    guarantee is gated on it).
    """

    f_hat: np.ndarray
    x_hat: np.ndarray
    L: int
    k_hat: int
    origin: int
    t0: int
    singular_values: np.ndarray
    balance: float

    @property
    def n_series(self) -> int:
        return self.f_hat.shape[0]

    @property
    def t_eff(self) -> int:
        return self.f_hat.shape[1]


def _unstack(data: np.ndarray, n_series: int) -> np.ndarray:
    """Read per-series values back out of a stacked Page matrix."""
    L, total = data.shape
    M = total // n_series
    out = np.empty((n_series, L * M))
    for n in range(n_series):
        block = data[:, n * M: (n + 1) * M]
        out[n] = block.T.ravel()
    return out


def decompose(panel: TimePanel, L: int, rule: RankRule) -> Decomposition:
    """Estimate the smooth component by rank truncation of the Page matrix.

    The rank is chosen once, on the full stacked Page matrix, and recorded
    as ``k_hat`` for reuse by the forecasting fit. Residuals are defined as
    observation minus estimate over the retained window.
    """
    page = stack(panel, L)
    decomp = svd(page.data)
    s = decomp.singular_values
    k_hat = select_rank(s, rule, shape=page.data.shape)
    denoised = decomp.truncate(k_hat)

    f_hat = _unstack(denoised, panel.n_series)
    retained = panel.values[:, page.origin:]
    x_hat = retained - f_hat
    n, t_eff = f_hat.shape
    return Decomposition(
        f_hat=f_hat,
        x_hat=x_hat,
        L=L,
        k_hat=k_hat,
        origin=page.origin,
        t0=panel.t0 + page.origin,
        singular_values=s,
        balance=float(s[k_hat - 1] * np.sqrt(k_hat) / np.sqrt(n * t_eff)),
    )


def est_err(decomp: Decomposition, truth: TimePanel, n: int) -> float:
    """Mean squared error of the smooth-component estimate for series n.

    ``truth`` must align with the decomposition window: either exactly the
    retained window (T == T_eff) or the original panel (T == origin + T_eff),
    whose dropped prefix is ignored. ``n`` is a 0-based series index.
    """
    if not 0 <= n < decomp.n_series:
        raise ShapeError(f"series index {n} outside 0..{decomp.n_series - 1}")
    if truth.n_series != decomp.n_series:
        raise ShapeError(
            f"truth has {truth.n_series} series, decomposition has {decomp.n_series}"
        )
    if truth.length == decomp.t_eff:
        aligned = truth.values[n]
    elif truth.length == decomp.origin + decomp.t_eff:
        aligned = truth.values[n, decomp.origin:]
    else:
        raise ShapeError(
            f"truth length {truth.length} matches neither T_eff={decomp.t_eff} "
            f"nor origin+T_eff={decomp.origin + decomp.t_eff}"
        )
    diff = decomp.f_hat[n] - aligned
    return float(np.mean(diff**2))

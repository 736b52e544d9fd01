"""Page matrices, the stacked Page matrix, and index bookkeeping.

A Page matrix cuts a series into non-overlapping length-L segments and
stacks them as columns (entries are not repeated, unlike a Hankel matrix).
The stacked Page matrix concatenates the per-series Page matrices
column-wise, in series order.

Index maps in this module use the mathematical 1-based convention
throughout: time indices t in 1..T, series indices n in 1..N, and matrix
coordinates (row, col) starting at (1, 1). Everything above this module
uses ordinary 0-based Python indexing for series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .panel import TimePanel

__all__ = [
    "PageShape",
    "StackedPage",
    "page_matrix",
    "stack",
    "cell_of",
    "time_of",
    "default_L",
]


@dataclass(frozen=True)
class PageShape:
    """Dimensions of a stacked Page matrix.

    L rows (segment length), M columns per series, N series; each series
    contributes its trailing T_eff = L*M entries.
    """

    L: int
    M: int
    N: int

    @property
    def t_eff(self) -> int:
        return self.L * self.M

    @property
    def cols(self) -> int:
        return self.N * self.M


@dataclass(frozen=True)
class StackedPage:
    """An L x (N*M) stacked Page matrix plus its layout metadata.

    ``origin`` is the number of leading observations dropped from each
    series so that the retained window length is divisible by L. Cell
    (i, (n-1)*M + j), 1-based, holds series n's value at time
    origin + (j-1)*L + i.
    """

    shape: PageShape
    data: np.ndarray
    origin: int = 0

    def __post_init__(self):
        expected = (self.shape.L, self.shape.cols)
        if self.data.shape != expected:
            raise ShapeError(f"data shape {self.data.shape} != {expected}")


def _page_block(series: np.ndarray, L: int) -> tuple[np.ndarray, int, int]:
    T = series.shape[0]
    if L < 1 or L > T:
        raise ShapeError(f"segment length L={L} invalid for series of length {T}")
    M = T // L
    origin = T - L * M
    block = series[origin:].reshape(M, L).T
    return block, M, origin


def page_matrix(series, L: int) -> StackedPage:
    """Page matrix of one series: columns are consecutive length-L segments.

    When L does not divide the length, the trailing L*floor(T/L) entries are
    used (recent data is favored for forecasting) and ``origin`` records the
    dropped prefix length.
    """
    series = np.asarray(series, dtype=np.float64)
    if series.ndim != 1:
        raise ShapeError("page_matrix expects a 1-D series")
    block, M, origin = _page_block(series, L)
    return StackedPage(shape=PageShape(L=L, M=M, N=1), data=block, origin=origin)


def stack(panel: TimePanel, L: int) -> StackedPage:
    """Stacked Page matrix of a panel: per-series blocks side by side."""
    blocks = []
    M = origin = None
    for n in range(panel.n_series):
        block, M, origin = _page_block(panel.values[n], L)
        blocks.append(block)
    data = np.hstack(blocks)
    return StackedPage(shape=PageShape(L=L, M=M, N=panel.n_series), data=data, origin=origin)


def cell_of(t: int, n: int, shape: PageShape, origin: int = 0) -> tuple[int, int]:
    """Matrix cell (row, col), 1-based, holding series n's value at time t.

    Inverse of :func:`time_of`. Raises IndexError when t falls outside the
    retained window (origin, origin + L*M] or n outside 1..N.
    """
    if not 1 <= n <= shape.N:
        raise IndexError(f"series index {n} outside 1..{shape.N}")
    local = t - origin
    if not 1 <= local <= shape.t_eff:
        raise IndexError(
            f"t={t} outside retained window ({origin}, {origin + shape.t_eff}]"
        )
    row = (local - 1) % shape.L + 1
    col = (n - 1) * shape.M + (local - 1) // shape.L + 1
    return row, col


def time_of(row: int, col: int, shape: PageShape, origin: int = 0) -> tuple[int, int]:
    """Time index and series (t, n), 1-based, stored at matrix cell (row, col)."""
    if not 1 <= row <= shape.L:
        raise IndexError(f"row {row} outside 1..{shape.L}")
    if not 1 <= col <= shape.cols:
        raise IndexError(f"col {col} outside 1..{shape.cols}")
    n = (col - 1) // shape.M + 1
    j = (col - 1) % shape.M + 1
    t = origin + (j - 1) * shape.L + row
    return t, n


def default_L(N: int, T: int, ratio: int = 1) -> int:
    """Default segment length: floor(sqrt(N*T / ratio)), clamped to [1, T].

    ``ratio`` is the target columns/rows shape of the stacked Page matrix
    (1 gives a square matrix; 3 or 5 give wider ones).
    """
    if N < 1 or T < 1:
        raise ShapeError("need N >= 1 and T >= 1")
    if ratio < 1:
        raise ShapeError(f"shape ratio must be >= 1, got {ratio}")
    L = int(math.isqrt(N * T // ratio))
    return max(1, min(L, T))

"""SVD, hard singular value thresholding, and data-driven rank selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankError

__all__ = ["SvdResult", "RankRule", "svd", "hsvt", "select_rank"]

# Singular values below this relative floor count as zero.
_ZERO_REL = 1e-14

# Two singular values within this relative gap are a tied group; threshold
# rules never split one (the retained subspace would be ill-defined).
_TIE_REL = 1e-12


@dataclass(frozen=True)
class SvdResult:
    """Full SVD with singular values in non-increasing order."""

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def truncate(self, k: int) -> np.ndarray:
        """Best rank-k reconstruction."""
        u = self.left_vectors[:, :k]
        s = self.singular_values[:k]
        vt = self.right_vectors[:, :k].T
        return (u * s) @ vt


def svd(matrix: np.ndarray) -> SvdResult:
    """Deterministic dense SVD (LAPACK); right vectors come back as columns."""
    u, s, vt = np.linalg.svd(np.asarray(matrix, dtype=np.float64), full_matrices=False)
    return SvdResult(singular_values=s, left_vectors=u, right_vectors=vt.T)


@dataclass(frozen=True)
class RankRule:
    """How to pick the HSVT threshold k from a singular spectrum.

    Three variants: a fixed k; the smallest k capturing a fraction of the
    spectral energy; or counting values above the shape-dependent universal
    threshold omega(beta) * median(s).
    """

    kind: str
    k: int | None = None
    fraction: float | None = None

    def __post_init__(self):
        if self.kind == "fixed":
            if self.k is None or self.k < 1:
                raise RankError(f"fixed rank must be >= 1, got {self.k}")
        elif self.kind == "energy":
            if self.fraction is None or not 0.0 < self.fraction <= 1.0:
                raise RankError(f"energy fraction must be in (0, 1], got {self.fraction}")
        elif self.kind != "universal":
            raise RankError(f"unknown rank rule {self.kind!r}")

    @classmethod
    def fixed(cls, k: int) -> "RankRule":
        return cls(kind="fixed", k=k)

    @classmethod
    def energy(cls, fraction: float) -> "RankRule":
        return cls(kind="energy", fraction=fraction)

    @classmethod
    def universal(cls) -> "RankRule":
        return cls(kind="universal")

    @classmethod
    def parse(cls, text: str) -> "RankRule":
        """Parse ``fixed:K``, ``energy:F``, or ``universal``."""
        if text == "universal":
            return cls.universal()
        kind, sep, arg = text.partition(":")
        if sep and kind == "fixed":
            return cls.fixed(int(arg))
        if sep and kind == "energy":
            return cls.energy(float(arg))
        raise RankError(f"cannot parse rank rule {text!r}")

    def __str__(self) -> str:
        if self.kind == "fixed":
            return f"fixed:{self.k}"
        if self.kind == "energy":
            return f"energy:{self.fraction}"
        return "universal"


def hsvt(matrix: np.ndarray, k: int) -> np.ndarray:
    """Hard singular value thresholding: the best rank-k approximation.

    Keeps the top k singular triplets and zeroes the rest; by Eckart-Young
    this is the Frobenius-optimal rank-k approximation.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise RankError("hsvt expects a 2-D matrix")
    if not 1 <= k <= min(matrix.shape):
        raise RankError(f"k={k} out of range for shape {matrix.shape}")
    return svd(matrix).truncate(k)


def _omega(beta: float) -> float:
    # Rational approximation of the optimal hard-threshold coefficient for
    # unknown noise level, as a function of the aspect ratio beta <= 1.
    return 0.56 * beta**3 - 0.95 * beta**2 + 1.82 * beta + 1.43


def _extend_ties(s: np.ndarray, k: int, n_positive: int) -> int:
    tol = _TIE_REL * s[0]
    while k < n_positive and s[k - 1] - s[k] <= tol:
        k += 1
    return k


def select_rank(singular_values, rule: RankRule, shape: tuple[int, int]) -> int:
    """Number of singular values to retain under ``rule``.

    ``shape`` is the (rows, cols) of the matrix the spectrum came from; only
    the universal-threshold rule uses it. Threshold-based rules never split
    a tied group of singular values. Raises RankError when the spectrum is
    all zero.
    """
    s = np.asarray(singular_values, dtype=np.float64)
    if s.ndim != 1 or s.size == 0:
        raise RankError("need a non-empty 1-D singular spectrum")
    if np.any(np.diff(s) > _TIE_REL * max(s[0], 1.0)):
        raise RankError("singular values must be non-increasing")
    if s[0] <= 0.0:
        raise RankError("all-zero spectrum")
    n_positive = int(np.sum(s > _ZERO_REL * s[0]))

    if rule.kind == "fixed":
        return min(rule.k, n_positive)

    if rule.kind == "energy":
        energy = np.cumsum(s**2)
        k = int(np.searchsorted(energy, rule.fraction * energy[-1] - 1e-15 * energy[-1])) + 1
        k = min(k, n_positive)
        return _extend_ties(s, k, n_positive)

    # universal threshold
    rows, cols = shape
    if rows < 1 or cols < 1:
        raise RankError(f"invalid shape {shape}")
    beta = min(rows, cols) / max(rows, cols)
    threshold = _omega(beta) * float(np.median(s))
    k = int(np.sum(s > threshold))
    k = max(1, min(k, n_positive))
    return _extend_ties(s, k, n_positive)

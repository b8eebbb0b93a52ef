"""Empirical wavelet coefficients for the two statistical models.

Covers the density model (observations on [0, 1]) and bounded regression
with uniform design (pairs in the unit square), plus the dyadic resolution
levels and the smallest threshold constant rho satisfying the deviation
condition of each model.

``log n`` means the natural logarithm throughout; any other base would only
shift constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .wavelets import WaveletExpansion, WaveletFamily, _level_sums

MIN_SAMPLE_SIZE = 16


@dataclass(frozen=True)
class DensitySample:
    """n i.i.d. observations from an unknown density on [0, 1]."""

    x: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        object.__setattr__(self, "x", x)
        if len(x) < MIN_SAMPLE_SIZE:
            raise ValueError(f"need at least {MIN_SAMPLE_SIZE} observations, got {len(x)}")
        if np.any((x < 0.0) | (x > 1.0)):
            raise ValueError("density observations must lie in [0, 1]")

    @property
    def n(self) -> int:
        return len(self.x)

    def subset(self, sl: slice) -> "DensitySample":
        return DensitySample(self.x[sl])


@dataclass(frozen=True)
class RegressionSample:
    """n i.i.d. pairs (x, y) in the unit square, uniform design."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if len(x) != len(y):
            raise ValueError("x and y must have the same length")
        if len(x) < MIN_SAMPLE_SIZE:
            raise ValueError(f"need at least {MIN_SAMPLE_SIZE} observations, got {len(x)}")
        if np.any((x < 0.0) | (x > 1.0)) or np.any((y < 0.0) | (y > 1.0)):
            raise ValueError("regression observations must lie in the unit square")

    @property
    def n(self) -> int:
        return len(self.x)

    def subset(self, sl: slice) -> "RegressionSample":
        return RegressionSample(self.x[sl], self.y[sl])


def j1_level(n: int) -> int:
    """The unique integer j1 with n/log n <= 2^j1 < 2 n/log n."""
    if n < MIN_SAMPLE_SIZE:
        raise ValueError(f"n must be at least {MIN_SAMPLE_SIZE}, got {n}")
    target = n / math.log(n)
    j = math.ceil(math.log2(target))
    while 2.0 ** j < target:
        j += 1
    while j > 0 and 2.0 ** (j - 1) >= target:
        j -= 1
    return j


def js_level(n: int, s: float) -> int:
    """The unique integer with n^{1/(1+2s)} <= 2^j < 2 n^{1/(1+2s)}."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if s <= 0:
        raise ValueError("smoothness s must be positive")
    target = n ** (1.0 / (1.0 + 2.0 * s))
    j = math.ceil(math.log2(target))
    while 2.0 ** j < target:
        j += 1
    while j > 0 and 2.0 ** (j - 1) >= target:
        j -= 1
    return j


def _expansion_from_sums(
    family: WaveletFamily, x: np.ndarray, weights: np.ndarray | None,
    j1: int, n: int,
) -> WaveletExpansion:
    alpha = _level_sums(family, "scaling", family.tau, x, weights) / n
    beta = [
        _level_sums(family, "wavelet", j, x, weights) / n
        for j in range(family.tau, j1 + 1)
    ]
    return WaveletExpansion(family.tau, j1, alpha, beta)


def density_coeffs(
    sample: DensitySample, family: WaveletFamily, j1: int
) -> WaveletExpansion:
    """Empirical coefficients (1/n) sum_i phi/psi_{j,k}(X_i) up to level j1."""
    if j1 < family.tau:
        raise ValueError(f"j1 = {j1} below coarsest level tau = {family.tau}")
    return _expansion_from_sums(family, sample.x, None, j1, sample.n)


def regression_coeffs(
    sample: RegressionSample, family: WaveletFamily, j1: int
) -> WaveletExpansion:
    """Empirical coefficients (1/n) sum_i Y_i phi/psi_{j,k}(X_i) up to level j1."""
    if j1 < family.tau:
        raise ValueError(f"j1 = {j1} below coarsest level tau = {family.tau}")
    return _expansion_from_sums(family, sample.x, sample.y, j1, sample.n)


def min_rho(B: float, psi_sup: float, model: str) -> float:
    """Smallest rho with rho^2 / (8B + (8 rho/(3 sqrt 2))(psi_sup + B)) = 4 log 2.

    The regression model fixes B = 1; the density model requires a density
    bound B >= 1. Solved exactly as the positive root of the quadratic
    rho^2 - a rho - b with a = 4 log(2) (8/(3 sqrt 2))(psi_sup + B) and
    b = 32 log(2) B.
    """
    if model not in ("density", "regression"):
        raise ValueError(f"model must be 'density' or 'regression', got {model!r}")
    if model == "regression":
        if B != 1.0:
            raise ValueError("the regression model fixes B = 1")
    elif B < 1.0:
        raise ValueError(f"density bound B must be >= 1, got {B}")
    ln2 = math.log(2.0)
    a = 4.0 * ln2 * (8.0 / (3.0 * math.sqrt(2.0))) * (psi_sup + B)
    b = 4.0 * ln2 * 8.0 * B
    rho = (a + math.sqrt(a * a + 4.0 * b)) / 2.0
    # re-check the defining display at the returned root
    assert rho ** 2 / (8.0 * B + (8.0 * rho / (3.0 * math.sqrt(2.0))) * (psi_sup + B)) \
        >= 4.0 * ln2 * (1.0 - 1e-12)
    return rho


def loss_difference_bound(model: str, B: float = 1.0) -> float:
    """Almost-sure bound K on loss differences over the clipped class.

    Regression: differences of squares of [0, 1] quantities, K = 1. Density
    quadratic loss on functions clipped to [0, B]: K = B^2 + 2B.
    """
    if model == "regression":
        return 1.0
    if model == "density":
        if B < 1.0:
            raise ValueError(f"density bound B must be >= 1, got {B}")
        return B * B + 2.0 * B
    raise ValueError(f"model must be 'density' or 'regression', got {model!r}")


def margin_constant(model: str, B: float = 1.0) -> float:
    """Margin-assumption constant c (margin exponent 1): 16, or 16 B^2."""
    if model == "regression":
        return 16.0
    if model == "density":
        if B < 1.0:
            raise ValueError(f"density bound B must be >= 1, got {B}")
        return 16.0 * B * B
    raise ValueError(f"model must be 'density' or 'regression', got {model!r}")

"""Richardson zero-noise extrapolation with variance propagation.

The primary path uses the closed-form Lagrange weights

    beta_k = prod_{l != k} lambda_l / (lambda_l - lambda_k)

so that the zero-noise estimate is ``sum_k beta_k * O(lambda_k)`` and its
variance is ``sum_k beta_k**2 * Var[O(lambda_k)]``.  ``polynomial_fit_solve``
solves the Vandermonde system directly and serves as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateScheduleError, InvalidInputError, InvalidIntervalError

# Relative spacing below which two noise levels count as the same level.
MIN_RELATIVE_SPACING = 1e-9


@dataclass(frozen=True)
class NoisePoint:
    """An observable estimate measured at total noise level ``lam``."""

    lam: float
    mean: float
    variance: float = 0.0
    shots: int = 0

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise InvalidInputError(f"noise level must be positive and finite, got {self.lam}")
        if not self.variance >= 0:
            raise InvalidInputError(f"variance must be non-negative, got {self.variance}")
        if self.shots < 0:
            raise InvalidInputError(f"shots must be >= 0, got {self.shots}")


@dataclass(frozen=True)
class ExtrapolationResult:
    theta0: float
    variance: float
    betas: tuple[float, ...] = field(default_factory=tuple)

    @property
    def order(self) -> int:
        return len(self.betas) - 1

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


def _validate_levels(lambdas: Sequence[float]) -> np.ndarray:
    lam = np.asarray(lambdas, dtype=float).ravel()
    if lam.size == 0:
        raise InvalidInputError("at least one noise level is required")
    if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
        raise InvalidInputError(f"noise levels must be positive and finite, got {lam.tolist()}")
    if lam.size > 1:
        gaps = np.abs(lam[:, None] - lam[None, :])
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() / lam.max() < MIN_RELATIVE_SPACING:
            raise DegenerateScheduleError(
                f"noise levels must be pairwise distinct, got {lam.tolist()}"
            )
    return lam


def richardson_coefficients(lambdas: Sequence[float]) -> np.ndarray:
    """Weights ``beta_k`` that map values at ``lambdas`` to the value at zero.

    >>> richardson_coefficients([1.0, 2.0]).tolist()
    [2.0, -1.0]
    """
    lam = _validate_levels(lambdas)
    betas = np.empty_like(lam)
    for k in range(lam.size):
        others = np.delete(lam, k)
        betas[k] = np.prod(others / (others - lam[k]))
    return betas


def zero_noise_estimate(points: Sequence[NoisePoint]) -> ExtrapolationResult:
    """Extrapolate through all points with a polynomial of order ``len(points) - 1``."""
    points = list(points)
    if not points:
        raise InvalidInputError("at least one noise point is required")
    betas = richardson_coefficients([pt.lam for pt in points])
    means = np.array([pt.mean for pt in points], dtype=float)
    variances = np.array([pt.variance for pt in points], dtype=float)
    theta0 = float(betas @ means)
    variance = float(betas**2 @ variances)
    return ExtrapolationResult(theta0=theta0, variance=variance, betas=tuple(betas.tolist()))


def polynomial_fit_solve(points: Sequence[NoisePoint]) -> np.ndarray:
    """Solve the Vandermonde system for the interpolating polynomial.

    Returns coefficients ``theta_0 ... theta_K`` in increasing power order.
    Levels are scaled by their maximum before the solve to keep the system
    well conditioned; coefficients are mapped back afterwards.
    """
    points = list(points)
    lam = _validate_levels([pt.lam for pt in points])
    means = np.array([pt.mean for pt in points], dtype=float)
    scale = lam.max()
    vander = np.vander(lam / scale, increasing=True)
    scaled = np.linalg.solve(vander, means)
    return scaled / scale ** np.arange(lam.size)


def linear_geometric_bound(lambda_a: float, lambda_b: float, sigma: float) -> float:
    """Upper bound on the std of a two-point linear extrapolation to zero.

    Each point has std ``sigma``; the extreme lines through opposite error
    bar ends spread by ``sigma * (lambda_b + lambda_a) / (lambda_b - lambda_a)``
    at zero noise.
    """
    if not (0 < lambda_a < lambda_b):
        raise InvalidIntervalError(
            f"need 0 < lambda_a < lambda_b, got lambda_a={lambda_a}, lambda_b={lambda_b}"
        )
    if sigma < 0:
        raise InvalidInputError(f"sigma must be non-negative, got {sigma}")
    return sigma * ((lambda_b + lambda_a) / (lambda_b - lambda_a))

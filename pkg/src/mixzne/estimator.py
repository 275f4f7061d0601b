from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_consistent_length, check_is_fitted

from .errors import InvalidInputError
from .extrapolation import NoisePoint, zero_noise_estimate


class RichardsonExtrapolator(RegressorMixin, BaseEstimator):
    """Exact polynomial extrapolation in noise level, sklearn style.

    ``X`` holds the noise levels (one column), ``y`` the measured means.
    ``fit`` interpolates through all ``K + 1`` points; ``predict`` evaluates
    the interpolant, so ``predict([[0]])`` returns the zero-noise estimate.

    Parameters
    ----------
    order : int or None
        Polynomial order ``K``. When given, ``fit`` insists on exactly
        ``K + 1`` samples; ``None`` takes the order from the data.

    Attributes
    ----------
    lambdas_ : ndarray of shape (K + 1,)
    betas_ : ndarray of shape (K + 1,)
        Zero-noise weights aligned with ``lambdas_``.
    theta0_ : float
    variance_ : float
        Propagated variance of ``theta0_``; zero when no variances were given.
    """

    def __init__(self, order=None):
        self.order = order

    def fit(self, X, y, sample_variance=None):
        X = check_array(X, ensure_2d=False, dtype=float)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise InvalidInputError(f"X must have a single noise-level column, got shape {X.shape}")
            X = X[:, 0]
        y = check_array(y, ensure_2d=False, dtype=float).ravel()
        check_consistent_length(X, y)
        if sample_variance is None:
            sample_variance = np.zeros_like(y)
        sample_variance = check_array(sample_variance, ensure_2d=False, dtype=float).ravel()
        check_consistent_length(y, sample_variance)
        if self.order is not None and len(X) != self.order + 1:
            raise InvalidInputError(
                f"order={self.order} needs {self.order + 1} samples, got {len(X)}"
            )

        result = zero_noise_estimate(
            NoisePoint(lam, mean, var) for lam, mean, var in zip(X, y, sample_variance)
        )
        self.lambdas_ = X.copy()
        self.values_ = y.copy()
        self.betas_ = np.asarray(result.betas)
        self.theta0_ = result.theta0
        self.variance_ = result.variance
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "betas_")
        X = check_array(X, ensure_2d=False, dtype=float)
        if X.ndim == 2:
            X = X[:, 0]
        return np.array([_lagrange_eval(self.lambdas_, self.values_, x) for x in X])


def _lagrange_eval(nodes, values, x):
    total = 0.0
    for k, node in enumerate(nodes):
        others = np.delete(nodes, k)
        total += values[k] * np.prod((x - others) / (node - others))
    return total

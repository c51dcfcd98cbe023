"""Scikit-learn style estimator facade over the sentiment predictors.

Each estimator wraps one model variant: ``fit(y)`` runs the slot-style
maximum-likelihood fit on a binary series, ``predict_proba(y)`` returns the
streaming one-step-ahead class probabilities for every position of a series
(row ``n`` is the forecast for ``y[n]`` given ``y[:n]``), and ``score(y)``
is the mean per-step log likelihood.  Hyperparameters live in ``__init__``
so ``get_params`` / ``set_params`` / ``clone`` behave as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validation import check_binary_series
from .fitting import fit, log_likelihood
from .predictors import one_step_path

__all__ = ["CompleteRP", "OnlyFashionRP", "NoFashionRP", "StandardPolya"]


class _OneStepEstimator(BaseEstimator):
    """Shared fit/predict plumbing; subclasses pin the model variant."""

    _variant: str = ""

    def fit(self, y, end: int | None = None):
        """Fit by maximum likelihood on ``y`` (optionally only ``y[:end]``)."""
        y = check_binary_series(y, min_len=2, name="y")
        result = fit(self._variant, y, y.size if end is None else int(end),
                     **self._fit_options())
        self.params_ = result.params
        self.log_likelihood_ = result.log_likelihood
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.degenerate_data_ = result.degenerate_data
        self._unpack(result.params)
        return self

    def _fit_options(self) -> dict:
        return {}

    def _unpack(self, params) -> None:
        raise NotImplementedError

    def _check_fitted(self):
        if not hasattr(self, "params_"):
            raise NotFittedError(
                f"this {type(self).__name__} instance is not fitted yet; call fit first"
            )
        return self.params_

    def predict_proba(self, y, start: int = 0) -> np.ndarray:
        """One-step-ahead class probabilities, shape ``(len(y) - start, 2)``."""
        params = self._check_fitted()
        y = check_binary_series(y, name="y")
        p_one = one_step_path(params, y, int(start), y.size)
        return np.column_stack((1.0 - p_one, p_one))

    def predict(self, y, start: int = 0) -> np.ndarray:
        """Most likely next bit at every position."""
        return (self.predict_proba(y, start)[:, 1] >= 0.5).astype(np.uint8)

    def score(self, y) -> float:
        """Mean one-step-ahead log likelihood of ``y`` (higher is better)."""
        params = self._check_fitted()
        y = check_binary_series(y, min_len=1, name="y")
        return log_likelihood(params, y) / y.size


class CompleteRP(_OneStepEstimator):
    """Locally reinforced predictor with free ``p0``, ``gamma_star``, ``beta``."""

    _variant = "complete"

    def __init__(self, b_tilde_init: float = 0.5, grid_points: int = 21):
        self.b_tilde_init = b_tilde_init
        self.grid_points = grid_points

    def _fit_options(self) -> dict:
        return {"b_tilde_init": self.b_tilde_init, "grid_points": self.grid_points}

    def _unpack(self, params) -> None:
        self.p0_ = params.p0
        self.gamma_star_ = params.gamma_star
        self.beta_ = params.beta


class OnlyFashionRP(_OneStepEstimator):
    """Pure fashion-process predictor (``gamma_star = 1``); fits ``beta``."""

    _variant = "only_fashion"

    def __init__(self, b_tilde_init: float = 0.5, grid_points: int = 21):
        self.b_tilde_init = b_tilde_init
        self.grid_points = grid_points

    def _fit_options(self) -> dict:
        return {"b_tilde_init": self.b_tilde_init, "grid_points": self.grid_points}

    def _unpack(self, params) -> None:
        self.beta_ = params.beta


class NoFashionRP(_OneStepEstimator):
    """Constant predictor (``gamma_star = 0``); fits ``p0`` in closed form."""

    _variant = "no_fashion"

    def __init__(self):
        pass

    def _unpack(self, params) -> None:
        self.p0_ = params.p0


class StandardPolya(_OneStepEstimator):
    """Standard Polya predictor; fits the composition ratios ``(a1, a)``."""

    _variant = "polya"

    def __init__(self, grid_points: int = 21):
        self.grid_points = grid_points

    def _fit_options(self) -> dict:
        return {"grid_points": self.grid_points}

    def _unpack(self, params) -> None:
        self.a1_ = params.a1
        self.a_ = params.a

"""Linear base learners.

Two fitting routines share one weighted normal-equation core:

* ``fit_ridge``: weighted ridge regression with an unpenalized intercept.
  With sample weights w_i and penalty theta >= 0 it solves

      (X_c' W X_c / sum(w) + theta I) omega = X_c' W y_c / sum(w)

  where X_c, y_c are centered at the weighted means (so the intercept is
  not shrunk) and the 1/sum(w) normalization makes theta comparable
  across sample sizes.

* ``fit_flattened_iw_ls``: importance-weighted least squares with
  exponential flattening. Density-ratio values r_i are raised to a power
  theta in [0, 1] and used as sample weights in an unpenalized weighted
  fit; theta = 0 recovers ordinary least squares, theta = 1 the fully
  weighted estimator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyInput, SingularSystem


@dataclass(frozen=True)
class Hyperparameter:
    """A point on the flattening/regularization search grid, in [0, 1]."""

    value: float

    def __post_init__(self) -> None:
        v = float(self.value)
        if not np.isfinite(v) or not 0.0 <= v <= 1.0:
            raise ValueError(f"hyperparameter must lie in [0, 1], got {self.value!r}")
        object.__setattr__(self, "value", v)


@dataclass
class LinearModel:
    """An affine predictor x -> weights @ x + intercept."""

    weights: np.ndarray
    intercept: float
    degenerate_weights: bool = False

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        self.intercept = float(self.intercept)
        if not (np.all(np.isfinite(self.weights)) and np.isfinite(self.intercept)):
            raise ValueError("model coefficients must be finite")


def square_loss(prediction: float, truth: float) -> float:
    """(prediction - truth)^2."""
    d = float(prediction) - float(truth)
    return d * d


def predict(model: LinearModel, features: np.ndarray) -> np.ndarray:
    """Evaluate the affine predictor row-wise on an (n, d) feature matrix."""
    x = _as_matrix(features)
    if x.shape[1] != model.weights.shape[0]:
        raise DimensionMismatch(
            f"model has {model.weights.shape[0]} weights, features have "
            f"{x.shape[1]} columns"
        )
    return x @ model.weights + model.intercept


def fit_ridge(
    features: np.ndarray,
    outputs: np.ndarray,
    sample_weights: np.ndarray,
    theta: float,
    *,
    fit_intercept: bool = True,
    singular: str = "raise",
) -> LinearModel:
    """Weighted ridge fit.

    Parameters
    ----------
    theta : float
        Penalty on the slope coefficients, >= 0. The intercept (when
        fitted) is never penalized.
    singular : {"raise", "minnorm"}
        What to do when the regularized normal equations are singular
        (only possible at theta = 0): raise SingularSystem, or return the
        minimum-norm least-squares solution, which is the theta -> 0+
        limit of the ridge path.
    """
    x, y, w = _validate_weighted(features, outputs, sample_weights)
    theta = float(theta)
    if not np.isfinite(theta) or theta < 0.0:
        raise ValueError(f"ridge penalty must be >= 0, got {theta!r}")
    if singular not in ("raise", "minnorm"):
        raise ValueError(f"unknown singular policy {singular!r}")

    total = w.sum()
    if fit_intercept:
        x_bar = (w @ x) / total
        y_bar = (w @ y) / total
        xc = x - x_bar
        yc = y - y_bar
    else:
        xc, yc = x, y

    gram = (xc * w[:, None]).T @ xc / total
    rhs = xc.T @ (w * yc) / total
    system = gram + theta * np.eye(x.shape[1])

    try:
        np.linalg.cholesky(system)
        coef = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        if singular == "raise":
            raise SingularSystem(
                "normal equations are singular; increase theta or pass "
                "singular='minnorm'"
            ) from None
        coef, *_ = np.linalg.lstsq(system, rhs, rcond=None)

    intercept = float(y_bar - x_bar @ coef) if fit_intercept else 0.0
    return LinearModel(weights=coef, intercept=intercept)


def fit_flattened_iw_ls(
    features: np.ndarray,
    outputs: np.ndarray,
    ratio_values: np.ndarray,
    theta: float,
    *,
    fit_intercept: bool = True,
    singular: str = "raise",
) -> LinearModel:
    """Importance-weighted least squares with flattening exponent theta.

    Sample weights are ratio_values ** theta (0 ** 0 taken as 1). If every
    weight vanishes the fit falls back to uniform weights and the returned
    model is flagged ``degenerate_weights=True``.
    """
    theta = Hyperparameter(theta).value
    x, y, r = _validate_weighted(features, outputs, ratio_values, allow_zero_total=True)
    w = r**theta
    degenerate = bool(np.all(w == 0.0))
    if degenerate:
        w = np.ones_like(w)
    model = fit_ridge(
        x, y, w, 0.0, fit_intercept=fit_intercept, singular=singular
    )
    model.degenerate_weights = degenerate
    return model


def _as_matrix(features: np.ndarray) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if x.ndim != 2:
        raise DimensionMismatch(f"features must be 2-D, got shape {x.shape}")
    return x


def _validate_weighted(features, outputs, weights, *, allow_zero_total: bool = False):
    x = _as_matrix(features)
    y = np.asarray(outputs, dtype=float).reshape(-1)
    w = np.asarray(weights, dtype=float).reshape(-1)
    if x.shape[0] == 0:
        raise EmptyInput("cannot fit on zero rows")
    if not (x.shape[0] == y.shape[0] == w.shape[0]):
        raise DimensionMismatch(
            f"rows disagree: features {x.shape[0]}, outputs {y.shape[0]}, "
            f"weights {w.shape[0]}"
        )
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.all(np.isfinite(w))):
        raise ValueError("inputs must be finite")
    if np.any(w < 0.0):
        raise ValueError("sample weights must be non-negative")
    if not allow_zero_total and w.sum() <= 0.0:
        raise ValueError("sample weights must not all be zero")
    return x, y, w

"""Target-risk estimators from labeled source validation points.

Given density-ratio values r_i = r_hat(x_i) and losses L_i on a source's
validation split, the importance-weighted estimator

    f_IW = mean(r_i * L_i)

is unbiased for the target risk when r_hat is the true ratio. Adding the
control variate (r_i - 1), whose mean is 1 - 1 = 0 under the source
distribution, with the variance-optimal coefficient

    eta = -Cov(r L, r) / Var(r)

gives the reduced-variance estimator

    f_CV = mean(r_i L_i + eta (r_i - 1)).

Div is the plug-in variance of the per-point summand z_i = r_i L_i +
eta (r_i - 1); it drives the federated weights

    lambda_j = 1 / (Div_j * sum_k n_k / Div_k),   alpha_j = lambda_j * n_j,

which solve the variance-minimization over all unbiased linear
aggregations. FedIWE instead weights every validation point equally
(lambda_j = 1 / sum_k n_k, alpha_j = n_j / sum_k n_k).

All moments are plug-in (1/n normalization).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyValidation

# Variance of z below this floor is clamped so weights stay finite.
DIV_FLOOR = 1e-8
# Var(r) below this guard makes the control coefficient 0 (no variate).
VAR_GUARD = 1e-12


@dataclass
class ValidationEvaluation:
    """Per-point ratio and loss values on one source's validation split."""

    ratio_values: np.ndarray
    loss_values: np.ndarray

    def __post_init__(self) -> None:
        self.ratio_values = np.asarray(self.ratio_values, dtype=float).reshape(-1)
        self.loss_values = np.asarray(self.loss_values, dtype=float).reshape(-1)
        if self.ratio_values.shape != self.loss_values.shape:
            raise DimensionMismatch(
                f"{self.ratio_values.shape[0]} ratios vs "
                f"{self.loss_values.shape[0]} losses"
            )
        if self.n_val == 0:
            raise EmptyValidation("validation split is empty")
        if not (
            np.all(np.isfinite(self.ratio_values))
            and np.all(np.isfinite(self.loss_values))
        ):
            raise ValueError("ratio and loss values must be finite")
        if np.any(self.ratio_values < 0):
            raise ValueError("ratio values must be non-negative")

    @property
    def n_val(self) -> int:
        return self.ratio_values.shape[0]


@dataclass
class SourceWeights:
    """Aggregation weights lambda_j with alpha_j = lambda_j * n_j."""

    lambdas: np.ndarray
    alphas: np.ndarray
    n_vals: np.ndarray

    def __post_init__(self) -> None:
        self.lambdas = np.asarray(self.lambdas, dtype=float).reshape(-1)
        self.alphas = np.asarray(self.alphas, dtype=float).reshape(-1)
        self.n_vals = np.asarray(self.n_vals, dtype=int).reshape(-1)
        if not (self.lambdas.shape == self.alphas.shape == self.n_vals.shape):
            raise DimensionMismatch("weight vectors must share one length")
        if np.any(self.lambdas < 0) or np.any(self.alphas < 0):
            raise ValueError("weights must be non-negative")
        if abs(float(self.lambdas @ self.n_vals) - 1.0) > 1e-9:
            raise ValueError("lambda weights must satisfy sum(lambda_j n_j) = 1")
        if not np.allclose(self.alphas, self.lambdas * self.n_vals, rtol=1e-9, atol=1e-12):
            raise ValueError("alphas must equal lambda_j * n_j")


def iw_risk(evaluation: ValidationEvaluation) -> float:
    """Importance-weighted risk estimate mean(r_i * L_i)."""
    return float(np.mean(evaluation.ratio_values * evaluation.loss_values))


def control_coefficient(evaluation: ValidationEvaluation) -> float:
    """Variance-optimal eta = -Cov(r L, r) / Var(r), plug-in moments.

    Returns 0 when Var(r) is below VAR_GUARD (the control variate is
    inert for near-constant ratios).
    """
    if evaluation.n_val < 2:
        raise EmptyValidation("need at least 2 validation points for eta")
    r = evaluation.ratio_values
    rl = r * evaluation.loss_values
    var_r = float(np.mean(r * r) - np.mean(r) ** 2)
    if var_r < VAR_GUARD:
        return 0.0
    cov = float(np.mean(rl * r) - np.mean(rl) * np.mean(r))
    return -cov / var_r


def cv_risk(evaluation: ValidationEvaluation, eta: float) -> float:
    """Control-variate risk estimate mean(r_i L_i + eta (r_i - 1))."""
    r = evaluation.ratio_values
    z = r * evaluation.loss_values + float(eta) * (r - 1.0)
    return float(np.mean(z))


def divergence_estimate(
    evaluation: ValidationEvaluation, eta: float, div_floor: float = DIV_FLOOR
) -> float:
    """Plug-in variance of z_i = r_i L_i + eta (r_i - 1), floored."""
    if evaluation.n_val < 2:
        raise EmptyValidation("need at least 2 validation points for Div")
    r = evaluation.ratio_values
    z = r * evaluation.loss_values + float(eta) * (r - 1.0)
    var_z = float(np.mean(z * z) - np.mean(z) ** 2)
    return max(var_z, float(div_floor))


def source_weights(divergences: np.ndarray, n_vals: np.ndarray) -> SourceWeights:
    """Divergence-aware weights: lambda_j inversely proportional to Div_j."""
    div = np.asarray(divergences, dtype=float).reshape(-1)
    n = np.asarray(n_vals, dtype=float).reshape(-1)
    if div.shape != n.shape or div.shape[0] == 0:
        raise DimensionMismatch("need matching, non-empty divergence and size vectors")
    if np.any(div <= 0):
        raise ValueError("divergences must be positive (apply the floor first)")
    if np.any(n < 1):
        raise ValueError("validation sizes must be >= 1")
    scale = float(np.sum(n / div))
    lam = 1.0 / (div * scale)
    return SourceWeights(lambdas=lam, alphas=lam * n, n_vals=n)


def uniform_weights(n_vals: np.ndarray) -> SourceWeights:
    """Sample-size weights: every validation point counts equally."""
    n = np.asarray(n_vals, dtype=float).reshape(-1)
    if n.shape[0] == 0:
        raise DimensionMismatch("need at least one source")
    if np.any(n < 1):
        raise ValueError("validation sizes must be >= 1")
    total = float(n.sum())
    lam = np.full(n.shape[0], 1.0 / total)
    return SourceWeights(lambdas=lam, alphas=n / total, n_vals=n)


def fed_iwe(risk_estimates: np.ndarray, n_vals: np.ndarray) -> float:
    """Size-weighted federated aggregate sum_j n_j f_j / sum_j n_j."""
    f = np.asarray(risk_estimates, dtype=float).reshape(-1)
    w = uniform_weights(n_vals)
    if f.shape != w.alphas.shape:
        raise DimensionMismatch("one risk estimate per source required")
    return float(w.alphas @ f)


def fed_dae(risk_estimates: np.ndarray, weights: SourceWeights) -> float:
    """Divergence-aware federated aggregate sum_j alpha_j f_j."""
    f = np.asarray(risk_estimates, dtype=float).reshape(-1)
    if f.shape != weights.alphas.shape:
        raise DimensionMismatch("one risk estimate per source required")
    return float(weights.alphas @ f)

"""Least-squares importance fitting (uLSIF) for covariate-shift weights.

The importance function is modeled as a non-negative combination of
Gaussian kernels,

    r_hat(x) = sum_b alpha_b exp(-||x - c_b||^2 / (2 sigma^2)),

with alpha obtained in closed form from

    alpha = (H_hat + rho I)^-1 h_hat,

where H_hat is the kernel second-moment matrix averaged over the first
sample and h_hat is the kernel mean over the second sample; negative
entries are clipped to zero afterwards. Kernel centers are subsampled
from the second sample. The bandwidth sigma and regularizer rho are
chosen by K-fold cross-validation of the same regularized objective

    J(alpha) = alpha' H alpha / 2 - h' alpha + rho ||alpha||^2 / 2

on held-out rows; exact ties prefer the larger sigma, then the larger
rho (smoother, more regularized fits). Fitted values average near 1
over held-out rows of the sample that supplied H_hat.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import DegenerateData, DimensionMismatch
from .rng import make_rng

# Kernel centers are capped so the Gram matrices stay small on large sources.
MAX_CENTERS = 100


@dataclass(frozen=True)
class UlsifConfig:
    """Search grids and caps for the uLSIF fit.

    Bandwidth candidates are multipliers of the median pairwise distance
    of the pooled sample. clip_ceiling bounds evaluated ratios from
    above (None disables the cap).
    """

    bandwidth_multipliers: tuple[float, ...] = (0.5, 1.0, 2.0)
    regularizers: tuple[float, ...] = (1e-3, 1e-2, 1e-1, 1.0)
    max_centers: int = MAX_CENTERS
    cv_folds: int = 5
    clip_ceiling: float | None = 50.0

    def __post_init__(self) -> None:
        if len(self.bandwidth_multipliers) == 0 or len(self.regularizers) == 0:
            raise ValueError("candidate grids must be non-empty")
        if any(m <= 0 for m in self.bandwidth_multipliers):
            raise ValueError("bandwidth multipliers must be positive")
        if any(r <= 0 for r in self.regularizers):
            raise ValueError("regularizers must be positive")
        if self.max_centers < 1 or self.cv_folds < 2:
            raise ValueError("max_centers >= 1 and cv_folds >= 2 required")
        if self.clip_ceiling is not None and self.clip_ceiling <= 0:
            raise ValueError("clip_ceiling must be positive or None")


@dataclass
class DensityRatioModel:
    centers: np.ndarray
    bandwidth: float
    coefficients: np.ndarray
    clip_ceiling: float | None = None

    def __post_init__(self) -> None:
        self.centers = np.asarray(self.centers, dtype=float)
        self.coefficients = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if self.centers.ndim != 2 or self.centers.shape[0] != self.coefficients.shape[0]:
            raise DimensionMismatch("one coefficient per center required")
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")
        if np.any(self.coefficients < 0):
            raise ValueError("ratio coefficients must be non-negative")


def gaussian_design(x: np.ndarray, centers: np.ndarray, bandwidth: float) -> np.ndarray:
    """Kernel design matrix Phi with Phi[i, b] = k_sigma(x_i, c_b)."""
    sq = cdist(np.atleast_2d(x), np.atleast_2d(centers), "sqeuclidean")
    return np.exp(-sq / (2.0 * bandwidth**2))


def fit_ulsif(
    target_features: np.ndarray,
    source_features: np.ndarray,
    config: UlsifConfig = UlsifConfig(),
    rng_seed: int = 0,
) -> DensityRatioModel:
    """Fit the kernel importance model from the two feature samples.

    The Gram matrix H_hat is averaged over target_features; the mean
    kernel vector h_hat and the centers come from source_features.
    Deterministic given (inputs, config, rng_seed): center subsampling
    and fold assignment are the only random steps and both draw from the
    seeded generator.
    """
    x_de = _sample(target_features, "target_features")
    x_nu = _sample(source_features, "source_features")
    if x_de.shape[1] != x_nu.shape[1]:
        raise DimensionMismatch(
            f"feature dimensions disagree: target {x_de.shape[1]}, "
            f"source {x_nu.shape[1]}"
        )

    pooled = np.vstack([x_de, x_nu])
    median_dist = float(np.median(pdist(pooled)))
    if median_dist <= 0.0:
        raise DegenerateData("pooled sample has zero median pairwise distance")

    rng = make_rng(rng_seed)
    n_centers = min(config.max_centers, x_nu.shape[0])
    center_idx = np.sort(rng.choice(x_nu.shape[0], size=n_centers, replace=False))
    centers = x_nu[center_idx]

    folds_nu = _fold_labels(rng, x_nu.shape[0], config.cv_folds, x_de.shape[0])
    folds_de = _fold_labels(rng, x_de.shape[0], config.cv_folds, x_nu.shape[0])

    scores = _cv_table(x_nu, x_de, centers, median_dist, config, folds_nu, folds_de)
    finite = np.isfinite(scores)
    if not finite.any():
        raise DegenerateData("cross-validation produced no finite objective")
    best = scores[finite].min()

    # Exact ties go to the larger bandwidth, then the larger regularizer.
    best_sigma = best_rho = None
    for i, mult in enumerate(config.bandwidth_multipliers):
        for j, rho in enumerate(config.regularizers):
            if finite[i, j] and scores[i, j] == best:
                sigma = mult * median_dist
                if best_sigma is None or (sigma, rho) > (best_sigma, best_rho):
                    best_sigma, best_rho = sigma, rho

    phi_nu = gaussian_design(x_nu, centers, best_sigma)
    phi_de = gaussian_design(x_de, centers, best_sigma)
    alpha = _solve_alpha(phi_nu, phi_de, best_rho)
    return DensityRatioModel(
        centers=centers,
        bandwidth=best_sigma,
        coefficients=alpha,
        clip_ceiling=config.clip_ceiling,
    )


def evaluate_ratio(model: DensityRatioModel, features: np.ndarray) -> np.ndarray:
    """Evaluate r_hat row-wise; values are clipped to [0, clip_ceiling]."""
    x = np.asarray(features, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.centers.shape[1]:
        raise DimensionMismatch(
            f"expected (n, {model.centers.shape[1]}) features, got {x.shape}"
        )
    values = gaussian_design(x, model.centers, model.bandwidth) @ model.coefficients
    hi = model.clip_ceiling if model.clip_ceiling is not None else np.inf
    return np.clip(values, 0.0, hi)


def constant_ratio_model(n_features: int) -> DensityRatioModel:
    """A model whose evaluated ratio is exactly 1 everywhere (r = 1 forced)."""
    return DensityRatioModel(
        centers=np.zeros((1, n_features)),
        bandwidth=np.inf,
        coefficients=np.ones(1),
        clip_ceiling=None,
    )


def _sample(features: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if x.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {x.shape}")
    if x.shape[0] < 2:
        raise DegenerateData(f"{name} needs at least 2 rows, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} must be finite")
    return x


def _fold_labels(rng: np.random.Generator, n: int, folds: int, n_other: int) -> np.ndarray:
    k = min(folds, n, n_other)
    return rng.permutation(n) % k


def _solve_alpha(phi_nu: np.ndarray, phi_de: np.ndarray, rho: float) -> np.ndarray:
    b = phi_nu.shape[1]
    h_hat = phi_nu.mean(axis=0)
    big_h = phi_de.T @ phi_de / phi_de.shape[0]
    alpha = np.linalg.solve(big_h + rho * np.eye(b), h_hat)
    return np.maximum(alpha, 0.0)


def _objective(alpha: np.ndarray, phi_nu: np.ndarray, phi_de: np.ndarray, rho: float) -> float:
    h_hat = phi_nu.mean(axis=0)
    big_h = phi_de.T @ phi_de / phi_de.shape[0]
    return float(0.5 * alpha @ big_h @ alpha - h_hat @ alpha + 0.5 * rho * alpha @ alpha)


def _cv_table(x_nu, x_de, centers, median_dist, config, folds_nu, folds_de) -> np.ndarray:
    """Mean held-out J(alpha) for each (bandwidth, regularizer) pair."""
    n_folds = int(folds_nu.max()) + 1
    scores = np.zeros((len(config.bandwidth_multipliers), len(config.regularizers)))
    for i, mult in enumerate(config.bandwidth_multipliers):
        sigma = mult * median_dist
        phi_nu = gaussian_design(x_nu, centers, sigma)
        phi_de = gaussian_design(x_de, centers, sigma)
        for j, rho in enumerate(config.regularizers):
            fold_scores = []
            for k in range(n_folds):
                alpha = _solve_alpha(phi_nu[folds_nu != k], phi_de[folds_de != k], rho)
                fold_scores.append(
                    _objective(alpha, phi_nu[folds_nu == k], phi_de[folds_de == k], rho)
                )
            scores[i, j] = float(np.mean(fold_scores))
    return scores

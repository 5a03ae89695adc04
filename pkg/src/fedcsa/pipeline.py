"""End-to-end orchestration: one federated run (or the labeled-target
reference) in, one weighted prediction model out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import LabeledDataset, train_test_split
from .density_ratio import UlsifConfig
from .errors import DimensionMismatch, EmptyInput, TooFewRows
from .estimators import DIV_FLOOR
from .federation import (
    SPLIT_FRACTIONS,
    EstimatorKind,
    Learner,
    TargetBroadcast,
    coordinate,
    decode_broadcast,
    decode_report,
    encode_broadcast,
    encode_report,
    prepare_ratio,
    source_round,
    split_source,
)
from .regression import (
    Hyperparameter,
    LinearModel,
    fit_flattened_iw_ls,
    fit_ridge,
    predict,
)
from .rng import derive_seed

THETA_GRID_POINTS = 21


def default_theta_grid(points: int = THETA_GRID_POINTS) -> list[float]:
    """Evenly spaced grid over [0, 1] (21 points: 0, 0.05, ..., 1)."""
    if points < 1:
        raise ValueError("grid needs at least one point")
    if points == 1:
        return [0.0]
    return [i / (points - 1) for i in range(points)]


@dataclass
class WeightedModel:
    """Convex combination of per-source models, sum_j alpha_j h_j."""

    components: list[tuple[float, LinearModel]]
    theta: Hyperparameter

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("need at least one component")
        alphas = np.array([a for a, _ in self.components], dtype=float)
        if np.any(alphas < 0) or abs(alphas.sum() - 1.0) > 1e-10:
            raise ValueError("component weights must be non-negative and sum to 1")
        dims = {m.weights.shape[0] for _, m in self.components}
        if len(dims) != 1:
            raise DimensionMismatch("component models disagree on dimension")


def weighted_predict(model: WeightedModel, features: np.ndarray) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    out = np.zeros(x.shape[0])
    for alpha, component in model.components:
        out += alpha * predict(component, x)
    return out


def mae(predictions: np.ndarray, truths: np.ndarray) -> float:
    p = np.asarray(predictions, dtype=float).reshape(-1)
    t = np.asarray(truths, dtype=float).reshape(-1)
    if p.shape[0] == 0:
        raise EmptyInput("mae needs at least one point")
    if p.shape != t.shape:
        raise DimensionMismatch(f"{p.shape[0]} predictions vs {t.shape[0]} truths")
    return float(np.mean(np.abs(p - t)))


def _clean_grid(theta_grid: Sequence[float]) -> list[float]:
    values = sorted({Hyperparameter(t).value for t in theta_grid})
    if not values:
        raise ValueError("theta grid must be non-empty")
    return values


def run_federated_method(
    sources: list[LabeledDataset],
    target_features: np.ndarray,
    kind: EstimatorKind,
    learner: Learner,
    theta_grid: Sequence[float],
    seed: int,
    *,
    split_fractions: tuple[float, float, float] = SPLIT_FRACTIONS,
    ulsif_config: UlsifConfig = UlsifConfig(),
    div_floor: float = DIV_FLOOR,
) -> WeightedModel:
    """Run the full protocol for one estimator kind and one base learner.

    All node/coordinator traffic passes through the wire codecs, so this
    path cannot observe raw source rows, and it never receives target
    labels at all.
    """
    if not sources:
        raise EmptyInput("need at least one source")
    grid = _clean_grid(theta_grid)

    broadcast_bytes = encode_broadcast(
        TargetBroadcast(target_features=np.asarray(target_features, dtype=float))
    )

    nodes = []
    for idx, dataset in enumerate(sources):
        source_id = dataset.name or f"source-{idx}"
        node = split_source(
            dataset,
            split_fractions,
            rng_seed=derive_seed(seed, "split", source_id),
            source_id=source_id,
        )
        if kind is not EstimatorKind.NAIVE:
            node = prepare_ratio(
                node,
                decode_broadcast(broadcast_bytes),
                ulsif_config,
                rng_seed=derive_seed(seed, "ulsif", source_id),
            )
        nodes.append(node)

    received = decode_broadcast(broadcast_bytes)
    report_bytes = [
        encode_report(
            source_round(node, received, theta, learner, kind, div_floor=div_floor)
        )
        for theta in grid
        for node in nodes
    ]
    decision = coordinate([decode_report(b) for b in report_bytes], kind)

    components = list(zip(decision.weights.alphas.tolist(), decision.models))
    return WeightedModel(components=components, theta=Hyperparameter(decision.chosen_theta))


def run_reference(
    target: LabeledDataset,
    learner: Learner,
    theta_grid: Sequence[float],
    seed: int,
    *,
    split_fraction: float = 0.5,
) -> WeightedModel:
    """Oracle baseline: grid selection and training on labeled target data.

    The target is split once; each grid value is fit on the train half and
    scored by mean square loss on the held-out half; ties go to the
    smallest theta. The returned model is the train-half fit at the
    selected value.
    """
    if target.n < 4:
        raise TooFewRows(f"reference needs >= 4 labeled target rows, got {target.n}")
    grid = _clean_grid(theta_grid)
    train, val = train_test_split(
        target, split_fraction, derive_seed(seed, "reference-split")
    )

    ones = np.ones(train.n)
    best_theta, best_score, best_model = None, np.inf, None
    for theta in grid:
        if learner is Learner.RIDGE:
            model = fit_ridge(
                train.features, train.outputs, ones, theta, singular="minnorm"
            )
        else:
            model = fit_flattened_iw_ls(
                train.features, train.outputs, ones, theta, singular="minnorm"
            )
        residual = predict(model, val.features) - val.outputs
        score = float(np.mean(residual**2))
        if score < best_score:
            best_theta, best_score, best_model = theta, score, model
    return WeightedModel(
        components=[(1.0, best_model)], theta=Hyperparameter(best_theta)
    )

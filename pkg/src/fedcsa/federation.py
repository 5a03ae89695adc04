"""Node-to-coordinator message passing.

One round of the protocol:

1. the target broadcasts its feature matrix (it has no labels to share);
2. each source splits its labeled rows into density-estimation, training
   and validation parts, fits a density-ratio model once, and then, per
   grid value theta, trains a local model and reports
   {source_id, theta, risk_estimate, model, divergence, n_val};
3. the coordinator aggregates the per-theta reports, picks the grid value
   with the smallest aggregated risk estimate, and forms the source
   weights for the chosen theta.

Everything that crosses the node/coordinator boundary is serialized to a
self-describing json wire format, so the full field set of every message
can be audited: raw source rows, labels, and ratio models never leave a
node. Python float repr round-trips exactly, which keeps the protocol
bit-deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .data import LabeledDataset
from .density_ratio import DensityRatioModel, UlsifConfig, evaluate_ratio, fit_ulsif
from .errors import DimensionMismatch, InconsistentReports, TooFewRows
from .estimators import (
    DIV_FLOOR,
    SourceWeights,
    ValidationEvaluation,
    control_coefficient,
    cv_risk,
    divergence_estimate,
    fed_dae,
    fed_iwe,
    iw_risk,
    source_weights,
    uniform_weights,
)
from .regression import LinearModel, fit_flattened_iw_ls, fit_ridge, predict
from .rng import make_rng

# Default share for (ratio-fit, train, validation). Validation gets the
# largest cut: it feeds three estimated quantities (risk, control
# coefficient, divergence), and with tiny sources their joint noise is
# what misleads hyperparameter selection first.
SPLIT_FRACTIONS = (0.3, 0.3, 0.4)


class EstimatorKind(str, Enum):
    """Which risk estimator/aggregation a federated run uses."""

    FED_IW = "FedIW"
    FED_DA = "FedDA"
    NAIVE = "Naive"  # r_hat forced to 1: ignores the shift entirely


class Learner(str, Enum):
    RIDGE = "ridge"
    FLATTENED = "flattened"


@dataclass
class TargetBroadcast:
    target_features: np.ndarray


@dataclass
class SourceNode:
    """A source's private state; never serialized."""

    source_id: str
    dataset: LabeledDataset
    de_idx: np.ndarray
    tr_idx: np.ndarray
    val_idx: np.ndarray
    ratio_model: DensityRatioModel | None = None


@dataclass
class SourceReport:
    """Everything a source transmits for one grid value theta."""

    source_id: str
    theta: float
    risk_estimate: float
    model: LinearModel
    divergence: float
    n_val: int


def split_source(
    dataset: LabeledDataset,
    fractions: tuple[float, float, float] = SPLIT_FRACTIONS,
    rng_seed: int = 0,
    source_id: str | None = None,
) -> SourceNode:
    """Disjointly split a source's rows into (de, tr, val) parts.

    Sizes follow floor(f * n) with the remainder going to the largest
    fractional parts (ties to the earlier part); empty parts are repaired
    by taking a row from the largest part, so all three are non-empty.
    """
    n = dataset.n
    if n < 3:
        raise TooFewRows(f"source {dataset.name!r} has {n} rows, need >= 3")
    frac = np.asarray(fractions, dtype=float)
    if frac.shape != (3,) or np.any(frac <= 0) or abs(frac.sum() - 1.0) > 1e-9:
        raise ValueError("fractions must be three positive numbers summing to 1")

    raw = frac * n
    sizes = np.floor(raw).astype(int)
    remainder = n - int(sizes.sum())
    order = np.argsort(-(raw - sizes), kind="stable")
    sizes[order[:remainder]] += 1
    while np.any(sizes == 0):
        sizes[int(np.argmax(sizes))] -= 1
        sizes[int(np.argmin(sizes))] += 1

    perm = make_rng(rng_seed).permutation(n)
    bounds = np.cumsum(sizes)
    return SourceNode(
        source_id=source_id if source_id is not None else dataset.name,
        dataset=dataset,
        de_idx=np.sort(perm[: bounds[0]]),
        tr_idx=np.sort(perm[bounds[0] : bounds[1]]),
        val_idx=np.sort(perm[bounds[1] :]),
    )


def prepare_ratio(
    node: SourceNode,
    broadcast: TargetBroadcast,
    config: UlsifConfig = UlsifConfig(),
    rng_seed: int = 0,
) -> SourceNode:
    """Fit the node's density-ratio model on its density-estimation split."""
    node.ratio_model = fit_ulsif(
        broadcast.target_features,
        node.dataset.features[node.de_idx],
        config,
        rng_seed,
    )
    return node


def source_round(
    node: SourceNode,
    broadcast: TargetBroadcast,
    theta: float,
    learner: Learner,
    kind: EstimatorKind,
    *,
    div_floor: float = DIV_FLOOR,
) -> SourceReport:
    """Local training + risk estimation for one grid value, at the source.

    FedIW/FedDA evaluate the fitted ratio model on the training and
    validation rows; Naive uses ratio 1 everywhere. FedDA additionally
    computes the control coefficient and the divergence of its summands;
    the other kinds transmit an inert divergence of 1.
    """
    x = node.dataset.features
    y = node.dataset.outputs
    if x.shape[1] != broadcast.target_features.shape[1]:
        raise DimensionMismatch(
            f"source {node.source_id!r} has {x.shape[1]}-dimensional rows, "
            f"broadcast is {broadcast.target_features.shape[1]}-dimensional"
        )
    if kind is EstimatorKind.NAIVE:
        r_tr = np.ones(node.tr_idx.shape[0])
        r_val = np.ones(node.val_idx.shape[0])
    else:
        if node.ratio_model is None:
            raise ValueError(f"source {node.source_id!r}: ratio model not fitted")
        r_tr = evaluate_ratio(node.ratio_model, x[node.tr_idx])
        r_val = evaluate_ratio(node.ratio_model, x[node.val_idx])

    if learner is Learner.RIDGE:
        model = fit_ridge(
            x[node.tr_idx], y[node.tr_idx], np.ones(node.tr_idx.shape[0]),
            theta, singular="minnorm",
        )
    else:
        model = fit_flattened_iw_ls(
            x[node.tr_idx], y[node.tr_idx], r_tr, theta, singular="minnorm"
        )

    residual = predict(model, x[node.val_idx]) - y[node.val_idx]
    evaluation = ValidationEvaluation(ratio_values=r_val, loss_values=residual**2)

    if kind is EstimatorKind.FED_DA:
        eta = control_coefficient(evaluation)
        risk = cv_risk(evaluation, eta)
        div = divergence_estimate(evaluation, eta, div_floor)
    else:
        risk = iw_risk(evaluation)
        div = 1.0
    return SourceReport(
        source_id=node.source_id,
        theta=float(theta),
        risk_estimate=risk,
        model=model,
        divergence=div,
        n_val=evaluation.n_val,
    )


@dataclass
class CoordinatorResult:
    chosen_theta: float
    weights: SourceWeights
    source_ids: list[str]
    models: list[LinearModel]
    aggregated_risks: dict[float, float]


def coordinate(
    reports: list[SourceReport], kind: EstimatorKind
) -> CoordinatorResult:
    """Aggregate per-theta reports and select the grid minimizer.

    Every grid value must carry a report from the same set of sources with
    equal model dimensions. Ties in the aggregated risk go to the smallest
    theta.
    """
    if not reports:
        raise InconsistentReports("no reports to coordinate")
    by_theta: dict[float, dict[str, SourceReport]] = {}
    for rep in reports:
        slot = by_theta.setdefault(rep.theta, {})
        if rep.source_id in slot:
            raise InconsistentReports(
                f"duplicate report from {rep.source_id!r} at theta={rep.theta}"
            )
        slot[rep.source_id] = rep

    source_ids = sorted(next(iter(by_theta.values())))
    dim = reports[0].model.weights.shape[0]
    for theta, slot in by_theta.items():
        if sorted(slot) != source_ids:
            raise InconsistentReports(
                f"theta={theta} is missing reports: have {sorted(slot)}, "
                f"expected {source_ids}"
            )
        for rep in slot.values():
            if rep.model.weights.shape[0] != dim:
                raise InconsistentReports(
                    f"{rep.source_id!r} reported a model of dimension "
                    f"{rep.model.weights.shape[0]}, expected {dim}"
                )

    aggregated: dict[float, float] = {}
    for theta in sorted(by_theta):
        ordered = [by_theta[theta][sid] for sid in source_ids]
        f = np.array([r.risk_estimate for r in ordered])
        n = np.array([r.n_val for r in ordered])
        if kind is EstimatorKind.FED_DA:
            div = np.array([r.divergence for r in ordered])
            aggregated[theta] = fed_dae(f, source_weights(div, n))
        else:
            aggregated[theta] = fed_iwe(f, n)

    chosen = min(sorted(aggregated), key=lambda t: (aggregated[t], t))
    ordered = [by_theta[chosen][sid] for sid in source_ids]
    n = np.array([r.n_val for r in ordered])
    if kind is EstimatorKind.FED_DA:
        weights = source_weights(np.array([r.divergence for r in ordered]), n)
    else:
        weights = uniform_weights(n)
    return CoordinatorResult(
        chosen_theta=chosen,
        weights=weights,
        source_ids=source_ids,
        models=[r.model for r in ordered],
        aggregated_risks=aggregated,
    )


# --- wire format -----------------------------------------------------------
#
# json with sorted keys; floats survive the round trip bit for bit.

def encode_broadcast(broadcast: TargetBroadcast) -> bytes:
    payload = {
        "kind": "target_broadcast",
        "target_features": np.asarray(broadcast.target_features, dtype=float).tolist(),
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def decode_broadcast(data: bytes) -> TargetBroadcast:
    payload = json.loads(data.decode())
    if payload.get("kind") != "target_broadcast":
        raise InconsistentReports("not a target broadcast message")
    return TargetBroadcast(
        target_features=np.asarray(payload["target_features"], dtype=float)
    )


def encode_report(report: SourceReport) -> bytes:
    payload = {
        "kind": "source_report",
        "source_id": report.source_id,
        "theta": report.theta,
        "risk_estimate": report.risk_estimate,
        "divergence": report.divergence,
        "n_val": report.n_val,
        "model": {
            "weights": report.model.weights.tolist(),
            "intercept": report.model.intercept,
            "degenerate_weights": report.model.degenerate_weights,
        },
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def decode_report(data: bytes) -> SourceReport:
    payload = json.loads(data.decode())
    if payload.get("kind") != "source_report":
        raise InconsistentReports("not a source report message")
    model = LinearModel(
        weights=np.asarray(payload["model"]["weights"], dtype=float),
        intercept=payload["model"]["intercept"],
        degenerate_weights=bool(payload["model"]["degenerate_weights"]),
    )
    return SourceReport(
        source_id=payload["source_id"],
        theta=float(payload["theta"]),
        risk_estimate=float(payload["risk_estimate"]),
        model=model,
        divergence=float(payload["divergence"]),
        n_val=int(payload["n_val"]),
    )


def wire_fields(data: bytes) -> list[str]:
    """Dotted paths of every field in a wire message (for privacy audits)."""
    payload = json.loads(data.decode())
    fields: list[str] = []

    def walk(obj, prefix):
        if isinstance(obj, dict):
            for key, val in obj.items():
                walk(val, f"{prefix}.{key}" if prefix else key)
        else:
            fields.append(prefix)

    walk(payload, "")
    return sorted(fields)

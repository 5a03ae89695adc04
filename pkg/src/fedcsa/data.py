"""Datasets: synthetic shift scenarios, the telemonitoring loader, splits,
standardization, and the label seal that keeps target outputs out of
reach of the federated path.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, MalformedCsv, TooFewRows
from .rng import derive_seed, make_rng

DIM = 10

# Column layout of the telemonitoring csv: subject id, three demographics,
# two UPDRS scores, then 16 voice measures (the regression features).
_N_COLUMNS = 22
_SUBJECT_COL = 0
_TARGET_COL = 5  # total_UPDRS
_FEATURE_COLS = slice(6, 22)


@dataclass
class LabeledDataset:
    features: np.ndarray
    outputs: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=float)
        self.outputs = np.asarray(self.outputs, dtype=float).reshape(-1)
        if self.features.ndim != 2:
            raise DimensionMismatch(f"features must be 2-D, got {self.features.shape}")
        if self.features.shape[0] != self.outputs.shape[0]:
            raise DimensionMismatch(
                f"{self.features.shape[0]} feature rows vs "
                f"{self.outputs.shape[0]} outputs"
            )

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


class SealedOutputs:
    """Holds target labels for evaluation only.

    The federated path receives the target's features next to this object
    and must never read it; any implicit access (iteration, array
    coercion, len) raises. Evaluation code calls reveal_for_evaluation().
    """

    __slots__ = ("_values",)

    def __init__(self, values: np.ndarray) -> None:
        self._values = np.asarray(values, dtype=float).reshape(-1).copy()

    def reveal_for_evaluation(self) -> np.ndarray:
        return self._values.copy()

    def __array__(self, *args, **kwargs):
        raise TypeError("sealed outputs: call reveal_for_evaluation() explicitly")

    def __iter__(self):
        raise TypeError("sealed outputs: call reveal_for_evaluation() explicitly")

    def __len__(self):
        raise TypeError("sealed outputs: call reveal_for_evaluation() explicitly")

    def __getitem__(self, item):
        raise TypeError("sealed outputs: call reveal_for_evaluation() explicitly")

    def __repr__(self) -> str:
        return "SealedOutputs(<hidden>)"


@dataclass
class SealedTarget:
    """Target node data as the federation sees it: features plus sealed labels."""

    features: np.ndarray
    outputs: SealedOutputs
    name: str = ""


def seal(dataset: LabeledDataset) -> SealedTarget:
    return SealedTarget(
        features=dataset.features.copy(),
        outputs=SealedOutputs(dataset.outputs),
        name=dataset.name,
    )


@dataclass(frozen=True)
class ScenarioSpec:
    """One synthetic cell: which generator, its sizes, shift, and seed."""

    kind: str  # "case1" | "case2"
    sample_sizes: tuple[int, ...] = ()
    shift_param: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("case1", "case2"):
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.kind == "case1" and len(self.sample_sizes) != 3:
            raise ValueError("case1 needs sizes (n_target, n_1, n_2)")


def _labels(features: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # y | x ~ N(mean(x), 1)
    return features.mean(axis=1) + rng.standard_normal(features.shape[0])


def _gaussian_dataset(
    rng: np.random.Generator, n: int, mean: float, var: float, name: str
) -> LabeledDataset:
    x = mean + np.sqrt(var) * rng.standard_normal((n, DIM))
    return LabeledDataset(features=x, outputs=_labels(x, rng), name=name)


def gen_case1(
    n_target: int, n_1: int, n_2: int, seed: int
) -> tuple[LabeledDataset, list[LabeledDataset]]:
    """Heterogeneous-source scenario.

    Target N(0, I), source 1 N(1, 3 I) (wide, covers the target), source 2
    N(5, 0.5 I) (narrow, far away); 10-dimensional, y | x ~ N(mean(x), 1).
    """
    if min(n_target, n_1, n_2) < 1:
        raise ValueError("sample sizes must be >= 1")
    target = _gaussian_dataset(
        make_rng(derive_seed(seed, "case1", "target")), n_target, 0.0, 1.0, "target"
    )
    s1 = _gaussian_dataset(
        make_rng(derive_seed(seed, "case1", "source-1")), n_1, 1.0, 3.0, "source-1"
    )
    s2 = _gaussian_dataset(
        make_rng(derive_seed(seed, "case1", "source-2")), n_2, 5.0, 0.5, "source-2"
    )
    return target, [s1, s2]


def gen_case2(shift: float, seed: int) -> tuple[LabeledDataset, list[LabeledDataset]]:
    """Increasing-shift scenario with fixed sizes (20, 50, 40).

    Target N(0, I); sources N(c, I) and N(c + 1, I) drift away together as
    the shift parameter c grows.
    """
    if not np.isfinite(shift):
        raise ValueError("shift must be finite")
    target = _gaussian_dataset(
        make_rng(derive_seed(seed, "case2", "target", shift)), 20, 0.0, 1.0, "target"
    )
    s1 = _gaussian_dataset(
        make_rng(derive_seed(seed, "case2", "source-1", shift)),
        50, float(shift), 1.0, "source-1",
    )
    s2 = _gaussian_dataset(
        make_rng(derive_seed(seed, "case2", "source-2", shift)),
        40, float(shift) + 1.0, 1.0, "source-2",
    )
    return target, [s1, s2]


def generate_scenario(spec: ScenarioSpec) -> tuple[LabeledDataset, list[LabeledDataset]]:
    if spec.kind == "case1":
        n_t, n_1, n_2 = spec.sample_sizes
        return gen_case1(n_t, n_1, n_2, spec.seed)
    return gen_case2(spec.shift_param, spec.seed)


def gen_target_pool(n: int, seed: int) -> LabeledDataset:
    """A fresh draw from the synthetic target law N(0, I), for held-out scoring."""
    return _gaussian_dataset(make_rng(seed), n, 0.0, 1.0, "target-pool")


def load_parkinsons(path: str) -> list[LabeledDataset]:
    """Read the telemonitoring csv into one dataset per subject.

    Features are the 16 voice measures, the output is total_UPDRS.
    Values are returned unstandardized; see standardize_by_sources.
    """
    subjects: dict[int, list[list[float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedCsv(f"{path}: empty file") from None
        if len(header) != _N_COLUMNS:
            raise MalformedCsv(
                f"{path}: expected {_N_COLUMNS} columns, header has {len(header)}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != _N_COLUMNS:
                raise MalformedCsv(
                    f"{path}: row {line_no} has {len(row)} columns, "
                    f"expected {_N_COLUMNS}"
                )
            try:
                values = [float(v) for v in row]
            except ValueError:
                raise MalformedCsv(f"{path}: row {line_no} has a non-numeric value") from None
            subjects.setdefault(int(values[_SUBJECT_COL]), []).append(values)

    datasets = []
    for subject_id in sorted(subjects):
        rows = np.asarray(subjects[subject_id], dtype=float)
        datasets.append(
            LabeledDataset(
                features=rows[:, _FEATURE_COLS],
                outputs=rows[:, _TARGET_COL],
                name=f"subject-{subject_id}",
            )
        )
    return datasets


def standardize_by_sources(
    sources: list[LabeledDataset], target: LabeledDataset
) -> tuple[list[LabeledDataset], LabeledDataset]:
    """Z-score all features with pooled source statistics only.

    The target contributes nothing to the location/scale estimates, so no
    target information leaks into preprocessing. Columns with zero pooled
    spread are left unscaled.
    """
    if not sources:
        raise ValueError("need at least one source")
    pooled = np.vstack([s.features for s in sources])
    mean = pooled.mean(axis=0)
    std = pooled.std(axis=0)
    std = np.where(std > 0, std, 1.0)

    def apply(ds: LabeledDataset) -> LabeledDataset:
        return LabeledDataset(
            features=(ds.features - mean) / std,
            outputs=ds.outputs.copy(),
            name=ds.name,
        )

    return [apply(s) for s in sources], apply(target)


def train_test_split(
    dataset: LabeledDataset, fraction: float, seed: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """Shuffled row split: ceil(fraction * n) rows train, the rest test."""
    if dataset.n < 2:
        raise TooFewRows(f"need at least 2 rows to split, got {dataset.n}")
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction!r}")
    perm = make_rng(seed).permutation(dataset.n)
    n_train = int(np.ceil(fraction * dataset.n))
    tr, te = np.sort(perm[:n_train]), np.sort(perm[n_train:])
    return (
        LabeledDataset(dataset.features[tr], dataset.outputs[tr], f"{dataset.name}-train"),
        LabeledDataset(dataset.features[te], dataset.outputs[te], f"{dataset.name}-test"),
    )

"""Experiment driver: scenario grids, per-seed runs, and the CSV tables.

A run is (scenario, method, seed) -> mean absolute error on held-out
target rows. Synthetic scenarios score on a fresh draw from the target
law; the telemonitoring scenario holds out a share of the target
subject's visits. Everything is keyed off one master seed so reruns are
byte-identical.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .data import (
    LabeledDataset,
    gen_case1,
    gen_case2,
    gen_target_pool,
    load_parkinsons,
    seal,
    standardize_by_sources,
    train_test_split,
)
from .density_ratio import UlsifConfig
from .errors import ConfigError
from .federation import EstimatorKind, Learner
from .pipeline import (
    default_theta_grid,
    mae,
    run_federated_method,
    run_reference,
    weighted_predict,
)
from .rng import derive_seed

# Table-style grid for the heterogeneous-source scenario: each target
# size pairs with five source-size combinations (n_1 - n_2 = 10).
CASE1_TARGET_SIZES = (20, 30, 40, 50)
CASE1_SOURCE_OFFSETS = (10, 20, 30, 40, 50)

CASE2_SHIFTS = (1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0)

METHOD_ORDER = ("FedDA", "FedIW", "Naive", "Reference")

_FEDERATED_KINDS = {
    "FedIW": EstimatorKind.FED_IW,
    "FedDA": EstimatorKind.FED_DA,
    "Naive": EstimatorKind.NAIVE,
}

RUNS_HEADER = ("scenario", "method", "seed", "mae", "theta", "wall_ms")
SUMMARY_HEADER = ("scenario", "method", "mean", "stderr", "worst")


@dataclass(frozen=True)
class ExperimentConfig:
    """Knobs shared by the simulate and real drivers; all defaulted."""

    seeds: int = 100
    master_seed: int = 0
    theta_points: int = 21
    test_pool: int = 1000  # held-out target rows per synthetic run
    ratio_clip: float | None = 25.0  # cap on fitted ratio values at evaluation
    case1_cells: tuple[tuple[int, int, int], ...] = ()  # empty = full grid
    case2_shifts: tuple[float, ...] = CASE2_SHIFTS
    subject: int = 1  # target subject id for the telemonitoring data
    train_fraction: float = 0.7  # target rows kept for adaptation (rest score)

    def __post_init__(self) -> None:
        if self.seeds < 1:
            raise ConfigError(f"seeds must be >= 1, got {self.seeds}")
        if self.theta_points < 1:
            raise ConfigError(f"theta_points must be >= 1, got {self.theta_points}")
        if self.test_pool < 1:
            raise ConfigError(f"test_pool must be >= 1, got {self.test_pool}")
        if self.ratio_clip is not None and self.ratio_clip <= 0:
            raise ConfigError(f"ratio_clip must be positive or none, got {self.ratio_clip}")
        for cell in self.case1_cells:
            if len(cell) != 3 or min(cell) < 1:
                raise ConfigError(f"bad case1 cell {cell!r}, need three positive sizes")
        if not self.case2_shifts:
            raise ConfigError("case2_shifts must be non-empty")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(
                f"train_fraction must be in (0, 1), got {self.train_fraction}"
            )

    def ulsif_config(self) -> "UlsifConfig":
        return UlsifConfig(clip_ceiling=self.ratio_clip)


_INT_KEYS = {"seeds", "master_seed", "theta_points", "test_pool", "subject"}
_FLOAT_KEYS = {"train_fraction", "ratio_clip"}  # ratio_clip also accepts "none"


def _parse_cells(raw: str) -> tuple[tuple[int, int, int], ...]:
    """Semicolon-separated size triples: "20,30,20; 20,40,30"."""
    cells = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [int(p) for p in chunk.split(",")]
        if len(parts) != 3:
            raise ValueError(chunk)
        cells.append(tuple(parts))
    return tuple(cells)


def _parse_shifts(raw: str) -> tuple[float, ...]:
    return tuple(float(p) for p in raw.split(",") if p.strip())


def load_config(path: str | None, section: str) -> ExperimentConfig:
    """Defaults, overridden by keys from the named section of an INI file.

    `section` is "simulate" or "real"; unknown keys are rejected so typos
    fail loudly instead of silently running the defaults.
    """
    config = ExperimentConfig()
    if path is None:
        return config
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    if not parser.has_section(section):
        return config
    overrides = {}
    known = _INT_KEYS | _FLOAT_KEYS | {"case1_cells", "case2_shifts"}
    for key, raw in parser.items(section):
        if key not in known:
            raise ConfigError(f"unknown config key [{section}] {key}")
        try:
            if key == "ratio_clip" and raw.strip().lower() == "none":
                overrides[key] = None
            elif key == "case1_cells":
                overrides[key] = _parse_cells(raw)
            elif key == "case2_shifts":
                overrides[key] = _parse_shifts(raw)
            elif key in _INT_KEYS:
                overrides[key] = int(raw)
            else:
                overrides[key] = float(raw)
        except ValueError:
            raise ConfigError(
                f"bad value for [{section}] {key}: {raw!r}"
            ) from None
    return replace(config, **overrides)


@dataclass(frozen=True)
class RunRecord:
    """One method's score on one seeded scenario instance."""

    scenario: str
    method: str
    seed: int
    mae: float
    chosen_theta: float
    wall_ms: int = 0  # pinned to 0: timing would break byte-determinism

    def __post_init__(self) -> None:
        if self.mae < 0 or self.wall_ms < 0:
            raise ValueError("mae and wall_ms must be nonnegative")


def case1_grid() -> list[tuple[int, int, int]]:
    return [
        (n_t, n_t + off, n_t + off - 10)
        for n_t in CASE1_TARGET_SIZES
        for off in CASE1_SOURCE_OFFSETS
    ]


def case1_scenario_name(n_target: int, n_1: int, n_2: int) -> str:
    return f"case1_nT={n_target}_n1={n_1}_n2={n_2}"


def case2_scenario_name(shift: float) -> str:
    return f"case2_c={shift:g}"


def real_scenario_name(subject: int, learner: Learner) -> str:
    return f"real_subject={subject}_learner={learner.value}"


def _score_methods(
    sources: list[LabeledDataset],
    target_features: np.ndarray,
    reference_data: LabeledDataset,
    test: LabeledDataset,
    learner: Learner,
    theta_grid: Sequence[float],
    run_seed: int,
    ulsif: UlsifConfig,
) -> dict[str, tuple[float, float]]:
    """All four methods on one scenario instance -> {method: (mae, theta)}.

    The federated methods see only the target features; the reference
    baseline gets the labeled rows outright.
    """
    out = {}
    for method, kind in _FEDERATED_KINDS.items():
        model = run_federated_method(
            sources, target_features, kind, learner, theta_grid, run_seed,
            ulsif_config=ulsif,
        )
        score = mae(weighted_predict(model, test.features), test.outputs)
        out[method] = (score, model.theta.value)
    model = run_reference(reference_data, learner, theta_grid, run_seed)
    score = mae(weighted_predict(model, test.features), test.outputs)
    out["Reference"] = (score, model.theta.value)
    return out


def _synthetic_records(
    scenario: str,
    make_data,
    config: ExperimentConfig,
    records: list[RunRecord],
) -> None:
    grid = default_theta_grid(config.theta_points)
    for s in range(1, config.seeds + 1):
        target, sources = make_data(derive_seed(config.master_seed, "data", scenario, s))
        pool = gen_target_pool(
            config.test_pool, derive_seed(config.master_seed, "testpool", scenario, s)
        )
        sealed = seal(target)
        scores = _score_methods(
            sources,
            sealed.features,
            target,
            pool,
            Learner.RIDGE,
            grid,
            derive_seed(config.master_seed, "run", scenario, s),
            config.ulsif_config(),
        )
        for method, (err, theta) in scores.items():
            records.append(RunRecord(scenario, method, s, err, theta))


def run_simulate(case: str, config: ExperimentConfig) -> list[RunRecord]:
    """All cells of one synthetic scenario grid, all seeds, all methods."""
    records: list[RunRecord] = []
    if case == "case1":
        for n_t, n_1, n_2 in config.case1_cells or case1_grid():
            scenario = case1_scenario_name(n_t, n_1, n_2)
            _synthetic_records(
                scenario,
                lambda seed, a=n_t, b=n_1, c=n_2: gen_case1(a, b, c, seed),
                config,
                records,
            )
    elif case == "case2":
        for shift in config.case2_shifts:
            scenario = case2_scenario_name(shift)
            _synthetic_records(
                scenario,
                lambda seed, c=shift: gen_case2(c, seed),
                config,
                records,
            )
    else:
        raise ConfigError(f"unknown case {case!r} (expected case1 or case2)")
    return sort_records(records)


def run_real(data_path: str, config: ExperimentConfig) -> list[RunRecord]:
    """Telemonitoring study: one subject is the target, the rest are sources.

    Per seed, the target subject's visits split into an adaptation part
    (features only, labels sealed away from the federated path; the
    reference baseline trains on them labeled) and a held-out part that
    scores all methods. Both base learners run.
    """
    subjects = load_parkinsons(data_path)
    by_name = {ds.name: ds for ds in subjects}
    target_name = f"subject-{config.subject}"
    if target_name not in by_name:
        known = ", ".join(sorted(by_name))
        raise ConfigError(f"no rows for subject {config.subject} (have: {known})")
    target_all = by_name[target_name]
    sources = [ds for ds in subjects if ds.name != target_name]
    sources, target_all = standardize_by_sources(sources, target_all)

    grid = default_theta_grid(config.theta_points)
    records: list[RunRecord] = []
    for s in range(1, config.seeds + 1):
        adapt, test = train_test_split(
            target_all,
            config.train_fraction,
            derive_seed(config.master_seed, "real-split", config.subject, s),
        )
        sealed = seal(adapt)
        for learner in (Learner.RIDGE, Learner.FLATTENED):
            scenario = real_scenario_name(config.subject, learner)
            scores = _score_methods(
                sources,
                sealed.features,
                adapt,
                test,
                learner,
                grid,
                derive_seed(config.master_seed, "run", scenario, s),
                config.ulsif_config(),
            )
            for method, (err, theta) in scores.items():
                records.append(RunRecord(scenario, method, s, err, theta))
    return sort_records(records)


def sort_records(records: Iterable[RunRecord]) -> list[RunRecord]:
    """Canonical output order: (scenario, method, seed)."""
    return sorted(records, key=lambda r: (r.scenario, r.method, r.seed))


@dataclass(frozen=True)
class SummaryRow:
    scenario: str
    method: str
    mean: float
    stderr: float
    worst: float


def summarize(records: Iterable[RunRecord]) -> list[SummaryRow]:
    """Mean, standard error (sample std / sqrt(R)), and worst mae per cell."""
    groups: dict[tuple[str, str], list[float]] = {}
    for rec in records:
        groups.setdefault((rec.scenario, rec.method), []).append(rec.mae)
    rows = []
    for (scenario, method), values in sorted(groups.items()):
        arr = np.asarray(values, dtype=float)
        stderr = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
        rows.append(
            SummaryRow(scenario, method, float(arr.mean()), stderr, float(arr.max()))
        )
    return rows


def _format_value(value) -> str:
    # repr keeps floats round-trippable; everything else is plain str
    return repr(value) if isinstance(value, float) else str(value)


def write_runs_csv(records: Iterable[RunRecord], path: str | Path) -> None:
    lines = [",".join(RUNS_HEADER)]
    for r in sort_records(records):
        lines.append(
            ",".join(
                _format_value(v)
                for v in (r.scenario, r.method, r.seed, r.mae, r.chosen_theta, r.wall_ms)
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_summary_csv(rows: Iterable[SummaryRow], path: str | Path) -> None:
    lines = [",".join(SUMMARY_HEADER)]
    for row in rows:
        lines.append(
            ",".join(
                _format_value(v)
                for v in (row.scenario, row.method, row.mean, row.stderr, row.worst)
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")

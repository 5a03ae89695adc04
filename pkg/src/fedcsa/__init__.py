"""Federated covariate-shift adaptation for regression without target labels.

Sources hold labeled data drawn under covariate shift from an unlabeled
target; each estimates the target risk of locally trained models by
importance weighting (optionally variance-reduced with a control variate),
and a coordinator aggregates the estimates with divergence-aware weights
to pick hyperparameters and form a weighted prediction model. No raw rows
or labels ever leave a node.
"""

from .data import (
    LabeledDataset,
    ScenarioSpec,
    SealedOutputs,
    SealedTarget,
    gen_case1,
    gen_case2,
    generate_scenario,
    load_parkinsons,
    seal,
    standardize_by_sources,
    train_test_split,
)
from .density_ratio import (
    DensityRatioModel,
    UlsifConfig,
    constant_ratio_model,
    evaluate_ratio,
    fit_ulsif,
)
from .errors import (
    ConfigError,
    DegenerateData,
    DimensionMismatch,
    EmptyInput,
    EmptyValidation,
    FedcsaError,
    InconsistentReports,
    MalformedCsv,
    SingularSystem,
    TooFewRows,
)
from .experiments import (
    ExperimentConfig,
    RunRecord,
    SummaryRow,
    case1_grid,
    load_config,
    run_real,
    run_simulate,
    summarize,
    write_runs_csv,
    write_summary_csv,
)
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
from .federation import (
    CoordinatorResult,
    EstimatorKind,
    Learner,
    SourceNode,
    SourceReport,
    TargetBroadcast,
    coordinate,
    decode_broadcast,
    decode_report,
    encode_broadcast,
    encode_report,
    prepare_ratio,
    source_round,
    split_source,
    wire_fields,
)
from .pipeline import (
    WeightedModel,
    default_theta_grid,
    mae,
    run_federated_method,
    run_reference,
    weighted_predict,
)
from .regression import (
    Hyperparameter,
    LinearModel,
    fit_flattened_iw_ls,
    fit_ridge,
    predict,
    square_loss,
)
from .rng import derive_seed, make_rng

__version__ = "0.1.0"

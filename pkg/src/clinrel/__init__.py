"""Clinical-relevance evaluation of synthetic image sets from embeddings.

Three complementary strategies over feature sets: directional KID comparisons
swept across generator iterations, exact t-SNE scatter plots, and a
train-with-augmentation classification experiment. All numerics are
deterministic given explicit seeds.
"""

from .classify import (
    AugReport,
    ClassificationReport,
    ClassMetrics,
    ConfusionMatrix,
    LogRegConfig,
    LogRegModel,
    Standardizer,
    augmentation_experiment,
    confusion,
    metrics,
    predict,
    render_aug_report,
    standardize_apply,
    standardize_fit,
    train_logreg,
)
from .errors import ClinrelError, FvecFormatError, ManifestError, MissingRoleError
from .features import FeatureSet, load_feature_file, write_feature_file
from .kid import KernelConfig, KidConfig, KidEstimate, kid_estimate, mmd2_unbiased, poly_kernel
from .protocol import (
    COLUMNS,
    ComparisonRow,
    SelectionResult,
    SweepTable,
    directional_matrix,
    iteration_sweep,
    make_sweep_table,
    render_sweep_report,
    select_iteration,
)
from .registry import (
    DatasetEntry,
    DatasetRegistry,
    Source,
    Split,
    ValidationReport,
    load_manifest,
    validate_registry,
)
from .rng import Pcg32, splitmix64, stream_seed
from .tsne import (
    CalibrationReport,
    TsneConfig,
    TsneResult,
    kl_gradient,
    kl_objective,
    pairwise_sq_dists,
    perplexity_calibration,
    render_scatter,
    tsne_embed,
)

__version__ = "0.1.0"

__all__ = [
    "AugReport",
    "ClassificationReport",
    "ClassMetrics",
    "ConfusionMatrix",
    "LogRegConfig",
    "LogRegModel",
    "Standardizer",
    "augmentation_experiment",
    "confusion",
    "metrics",
    "predict",
    "render_aug_report",
    "standardize_apply",
    "standardize_fit",
    "train_logreg",
    "ClinrelError",
    "FvecFormatError",
    "ManifestError",
    "MissingRoleError",
    "FeatureSet",
    "load_feature_file",
    "write_feature_file",
    "KernelConfig",
    "KidConfig",
    "KidEstimate",
    "kid_estimate",
    "mmd2_unbiased",
    "poly_kernel",
    "COLUMNS",
    "ComparisonRow",
    "SelectionResult",
    "SweepTable",
    "directional_matrix",
    "iteration_sweep",
    "make_sweep_table",
    "render_sweep_report",
    "select_iteration",
    "DatasetEntry",
    "DatasetRegistry",
    "Source",
    "Split",
    "ValidationReport",
    "load_manifest",
    "validate_registry",
    "Pcg32",
    "splitmix64",
    "stream_seed",
    "CalibrationReport",
    "TsneConfig",
    "TsneResult",
    "kl_gradient",
    "kl_objective",
    "pairwise_sq_dists",
    "perplexity_calibration",
    "render_scatter",
    "tsne_embed",
    "__version__",
]

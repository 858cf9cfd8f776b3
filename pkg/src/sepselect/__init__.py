"""Feature selection by spatially-aware class separability."""

from .dataset import (
    ClassPartition,
    Dataset,
    DatasetError,
    FoldAssignment,
    load_csv,
    minmax_normalize,
    partition_by_class,
    stratified_folds,
)
from .evaluation import (
    EvalConfig,
    EvaluationCurve,
    Metric,
    kmeans_deterministic,
    kmeans_seed_indices,
    knn_accuracy,
    nmi,
    performance_curve,
)
from .selector import SelectionStep, SelectionTrace, gain, select
from .separability import (
    Centroids,
    SeparabilityParams,
    SeparabilityScore,
    Variant,
    between_separation_direction,
    between_separation_distance,
    centroid_memberships,
    class_centroids,
    cosine,
    instance_memberships,
    nearest_class,
    separability,
    within_compactness_direction,
    within_compactness_distance,
)
from .stats import DegenerateFriedmanError, FriedmanResult, RankTable, friedman, nemenyi_cd, rank_rows

__version__ = "0.1.0"

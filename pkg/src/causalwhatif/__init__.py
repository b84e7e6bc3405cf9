"""Causality-guided decision exploration.

Fit an interpretable path model over a causal DAG, then probe it: apply
do-interventions, ask what-if questions, compare two live profiles, inspect
outcome-radius neighbors in a PCA plane, and score how realistic a
hypothetical profile is against a Gaussian-mixture fit of the data.
"""

from .dataset import (
    ColumnStats,
    Dataset,
    IngestConfig,
    IngestReport,
    Split,
    compute_stats,
    ingest_csv,
    split,
    standardize,
    unstandardize,
)
from .engine import (
    PredictionResult,
    Profile,
    TrackerState,
    clear_intervention,
    initial_profile,
    non_impacting,
    predict,
    restore,
    save_state,
    set_value,
)
from .errors import CausalWhatifError
from .graph import CausalDag, EditAction, MixedGraph, edit, finalize, layers, topo_order
from .profile_map import NeighborMap, build_map, embed, neighbors, pick, project
from .realism import GmmModel, RealismReading, fit_gmm, realism, typicality
from .search import ci_test, list_algorithms, partial_correlation, pc_search
from .sem import (
    AccuracyReport,
    FitReport,
    FittedModel,
    evaluate_accuracy,
    fit_indices,
    fit_model,
    fit_paths,
    implied_covariance,
)

__version__ = "0.1.0"

__all__ = [
    "CausalWhatifError",
    "Dataset", "ColumnStats", "Split", "IngestConfig", "IngestReport",
    "ingest_csv", "compute_stats", "standardize", "unstandardize", "split",
    "MixedGraph", "CausalDag", "EditAction", "edit", "finalize", "layers", "topo_order",
    "partial_correlation", "ci_test", "pc_search", "list_algorithms",
    "FittedModel", "FitReport", "AccuracyReport",
    "fit_paths", "implied_covariance", "fit_indices", "evaluate_accuracy", "fit_model",
    "Profile", "PredictionResult", "TrackerState",
    "initial_profile", "set_value", "clear_intervention", "predict", "non_impacting",
    "save_state", "restore",
    "GmmModel", "RealismReading", "fit_gmm", "realism", "typicality",
    "NeighborMap", "neighbors", "embed", "project", "pick", "build_map",
    "__version__",
]

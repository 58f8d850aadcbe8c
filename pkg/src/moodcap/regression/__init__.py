"""Affect regression: standardize, project with PCA, fit epsilon-SVRs."""

from .evaluate import (
    LabeledDataset,
    TrialReport,
    TrialStats,
    evaluate_trials,
    mse,
    r2,
    run_trial,
    trial_seed,
)
from .gridsearch import (
    CvCell,
    GridSearchResult,
    SearchGrid,
    grid_search_cv,
    kfold_indices,
)
from .model import (
    SerModel,
    join_features_labels,
    load_labels_csv,
    load_model,
    predict_affect,
    save_model,
    train_ser,
)
from .pca import PcaModel, Scaler, fit_scaler, pca_fit, pca_transform
from .svr import (
    ConvergenceError,
    SvrModel,
    SvrParams,
    kernel_matrix,
    smo_solve,
    svr_fit,
    svr_predict,
)

__all__ = [
    "ConvergenceError",
    "CvCell",
    "GridSearchResult",
    "LabeledDataset",
    "PcaModel",
    "Scaler",
    "SearchGrid",
    "SerModel",
    "SvrModel",
    "SvrParams",
    "TrialReport",
    "TrialStats",
    "evaluate_trials",
    "fit_scaler",
    "grid_search_cv",
    "join_features_labels",
    "kernel_matrix",
    "kfold_indices",
    "load_labels_csv",
    "load_model",
    "mse",
    "pca_fit",
    "pca_transform",
    "predict_affect",
    "r2",
    "run_trial",
    "save_model",
    "smo_solve",
    "svr_fit",
    "svr_predict",
    "train_ser",
    "trial_seed",
]

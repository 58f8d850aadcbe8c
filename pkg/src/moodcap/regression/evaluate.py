"""Train/test trials and their aggregation.

A trial shuffles the labeled clips with a seeded generator, takes the
first floor(0.8 n) as the training split, grid-searches hyperparameters
for valence and arousal on that split, refits on the full split, and
reports test-set R-squared and MSE for both affect dimensions.  The two
regressors share one PCA: the width is chosen jointly as the k whose
best cells, summed across the two targets, give the lowest mean CV MSE.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .gridsearch import GridSearchResult, SearchGrid, grid_search_cv
from .pca import fit_scaler, pca_fit, pca_transform
from .svr import SvrParams, svr_fit, svr_predict

METRIC_FIELDS = ("r2_valence", "mse_valence", "r2_arousal", "mse_arousal")
MIN_CLIPS = 10
TRAIN_FRACTION = 0.8


def mse(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape or y_true.size == 0:
        raise ValueError("inputs must be equal-length and non-empty")
    return float(np.mean((y_true - y_pred) ** 2))


def r2(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """1 - SSres/SStot; a constant y_true gives 1 for a perfect fit else 0."""
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape or y_true.size == 0:
        raise ValueError("inputs must be equal-length and non-empty")
    ss_res = float(np.sum((y_true - y_pred) ** 2))
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return 1.0 - ss_res / ss_tot


@dataclass
class LabeledDataset:
    """Feature matrix plus per-clip affect targets, aligned by row."""

    clip_ids: list[str]
    X: np.ndarray  # n x 72
    valence: np.ndarray
    arousal: np.ndarray

    def __post_init__(self):
        n = len(self.clip_ids)
        if not (self.X.shape[0] == self.valence.size == self.arousal.size == n):
            raise ValueError("misaligned dataset arrays")

    def __len__(self) -> int:
        return len(self.clip_ids)

    def take(self, idx: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(
            [self.clip_ids[i] for i in idx],
            self.X[idx],
            self.valence[idx],
            self.arousal[idx],
        )


@dataclass(frozen=True)
class TrialReport:
    r2_valence: float
    mse_valence: float
    r2_arousal: float
    mse_arousal: float
    seed: int


@dataclass
class TrialStats:
    """Per-metric mean and population standard deviation over trials."""

    mean: dict[str, float]
    sd: dict[str, float]
    reports: list[TrialReport]


def trial_seed(base_seed: int, index: int) -> int:
    """Independent per-trial seed; no shared RNG between trials."""
    return int(np.random.SeedSequence((base_seed, index)).generate_state(1)[0])


def select_shared_k(
    results: dict[str, GridSearchResult], k_list: tuple[int, ...]
) -> tuple[int, dict[str, SvrParams]]:
    """Single PCA width for all targets: lowest summed best CV MSE, tie lower k.

    Returns the chosen k and each target's best params at that k.
    """
    scored = []
    for k in sorted(set(k_list)):
        cells = {t: r.best_for_k(k) for t, r in results.items()}
        if any(c is None for c in cells.values()):
            continue
        scored.append((sum(c.mean_mse for c in cells.values()), k, cells))
    if not scored:
        raise ValueError("no PCA width is feasible for every target")
    _, best_k, cells = min(scored, key=lambda s: (s[0], s[1]))
    params = {
        t: SvrParams(
            c=cell.c,
            gamma=cell.gamma,
            kernel=cell.kernel,
            epsilon=results[t].best_params.epsilon,
            tol=results[t].best_params.tol,
            max_iter=results[t].best_params.max_iter,
        )
        for t, cell in cells.items()
    }
    return best_k, params


def split_indices(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded shuffle then an 80:20 split with floor(0.8 n) training rows."""
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(TRAIN_FRACTION * n)
    return perm[:n_train], perm[n_train:]


def fit_split(
    train: LabeledDataset, k: int, params: dict[str, SvrParams]
) -> tuple:
    """Refit scaler, PCA, and both SVRs on a training split."""
    scaler = fit_scaler(train.X)
    Xs = scaler.transform(train.X)
    pca = pca_fit(Xs, k)
    Xp = pca_transform(pca, Xs)
    svr_v = svr_fit(Xp, train.valence, params["valence"])
    svr_a = svr_fit(Xp, train.arousal, params["arousal"])
    return scaler, pca, svr_v, svr_a


def search_split(
    train: LabeledDataset, grid: SearchGrid, folds: int
) -> tuple[int, dict[str, SvrParams], dict[str, GridSearchResult]]:
    results = {
        "valence": grid_search_cv(train.X, train.valence, grid, folds),
        "arousal": grid_search_cv(train.X, train.arousal, grid, folds),
    }
    best_k, params = select_shared_k(results, grid.k_pca_list)
    return best_k, params, results


def run_trial(
    dataset: LabeledDataset,
    seed: int,
    grid: SearchGrid = SearchGrid(),
    folds: int = 5,
    fixed: tuple[int, dict[str, SvrParams]] | None = None,
) -> TrialReport:
    """One shuffled 80:20 train/test evaluation.

    `fixed` skips the grid search and reuses a (k, per-target params)
    choice, for callers that search once and evaluate many times.
    """
    if len(dataset) < MIN_CLIPS:
        raise ValueError(f"need at least {MIN_CLIPS} clips, got {len(dataset)}")
    train_idx, test_idx = split_indices(len(dataset), seed)
    train, test = dataset.take(train_idx), dataset.take(test_idx)

    if fixed is None:
        best_k, params, _ = search_split(train, grid, folds)
    else:
        best_k, params = fixed
    scaler, pca, svr_v, svr_a = fit_split(train, best_k, params)

    Xp = pca_transform(pca, scaler.transform(test.X))
    pred_v = svr_predict(svr_v, Xp)
    pred_a = svr_predict(svr_a, Xp)
    return TrialReport(
        r2_valence=r2(test.valence, pred_v),
        mse_valence=mse(test.valence, pred_v),
        r2_arousal=r2(test.arousal, pred_a),
        mse_arousal=mse(test.arousal, pred_a),
        seed=seed,
    )


def evaluate_trials(
    dataset: LabeledDataset,
    n_trials: int = 100,
    base_seed: int = 0,
    grid: SearchGrid = SearchGrid(),
    folds: int = 5,
    search_each_trial: bool = True,
    jobs: int = 1,
) -> TrialStats:
    """Aggregate metric means and population SDs over independent trials.

    With search_each_trial False the grid search runs once, on the first
    trial's training split, and later trials reuse that choice.  Trials
    are independent (each derives its seed from (base_seed, index)), so
    jobs > 1 runs them concurrently with identical results.
    """
    if n_trials < 1:
        raise ValueError("need at least one trial")
    fixed = None
    if not search_each_trial:
        train_idx, _ = split_indices(len(dataset), trial_seed(base_seed, 0))
        best_k, params, _ = search_split(dataset.take(train_idx), grid, folds)
        fixed = (best_k, params)

    def one(i: int) -> TrialReport:
        return run_trial(dataset, trial_seed(base_seed, i), grid, folds, fixed=fixed)

    if jobs == 1:
        reports = [one(i) for i in range(n_trials)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(one, range(n_trials)))
    values = {f: np.array([getattr(r, f) for r in reports]) for f in METRIC_FIELDS}
    return TrialStats(
        mean={f: float(v.mean()) for f, v in values.items()},
        sd={f: float(v.std()) for f, v in values.items()},
        reports=reports,
    )

"""Exhaustive grid search with k-fold cross-validation.

Every cell re-fits the scaler and the PCA inside each fold on that fold's
training rows only; validation rows never touch a fit.  Tests rely on the
module-level names `fit_scaler` / `pca_fit` being the functions called
here, so they can be monkeypatched for leakage instrumentation — do not
rebind them locally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pca import fit_scaler, pca_fit, pca_transform
from .svr import KERNELS, SvrParams, svr_fit, svr_predict

DEFAULT_C = (0.1, 1.0, 10.0, 100.0)
DEFAULT_GAMMA = ("scale", 0.001, 0.01, 0.1, 1.0)
DEFAULT_KERNELS = KERNELS  # rbf, linear, poly
DEFAULT_K_PCA = (8, 16, 24, 32, 48, 64)

_KERNEL_RANK = {"rbf": 0, "linear": 1, "poly": 2}


def _gamma_key(gamma: float | str) -> tuple[int, float]:
    # "scale" sorts before any numeric gamma
    return (0, 0.0) if isinstance(gamma, str) else (1, float(gamma))


@dataclass(frozen=True)
class SearchGrid:
    c_list: tuple[float, ...] = DEFAULT_C
    gamma_list: tuple[float | str, ...] = DEFAULT_GAMMA
    kernel_list: tuple[str, ...] = DEFAULT_KERNELS
    k_pca_list: tuple[int, ...] = DEFAULT_K_PCA
    epsilon: float = 0.1
    tol: float = 1e-3
    max_iter: int = 1_000_000

    def __post_init__(self):
        if not (self.c_list and self.gamma_list and self.kernel_list and self.k_pca_list):
            raise ValueError("grid lists must be non-empty")
        for kern in self.kernel_list:
            if kern not in KERNELS:
                raise ValueError(f"unknown kernel {kern!r}")


@dataclass
class CvCell:
    k_pca: int
    kernel: str
    c: float
    gamma: float | str
    fold_mses: list[float]
    mean_mse: float
    feasible: bool

    def sort_key(self):
        return (
            self.mean_mse,
            self.k_pca,
            self.c,
            _KERNEL_RANK[self.kernel],
            _gamma_key(self.gamma),
        )

    def to_dict(self) -> dict:
        return {
            "k_pca": self.k_pca,
            "kernel": self.kernel,
            "c": self.c,
            "gamma": self.gamma,
            "fold_mses": self.fold_mses,
            "mean_mse": self.mean_mse,
            "feasible": self.feasible,
        }


@dataclass
class GridSearchResult:
    best_params: SvrParams
    best_k: int
    table: list[CvCell] = field(repr=False)

    def best_for_k(self, k: int) -> CvCell | None:
        """Lowest-scoring feasible cell at a fixed PCA width, or None."""
        cells = [c for c in self.table if c.k_pca == k and c.feasible]
        return min(cells, key=CvCell.sort_key) if cells else None


def kfold_indices(n: int, folds: int) -> list[np.ndarray]:
    """Contiguous fold index blocks; the first n % folds blocks get one extra."""
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if folds > n:
        raise ValueError(f"cannot split {n} rows into {folds} folds")
    base, extra = divmod(n, folds)
    out, start = [], 0
    for f in range(folds):
        size = base + (1 if f < extra else 0)
        out.append(np.arange(start, start + size))
        start += size
    return out


def grid_search_cv(
    X: np.ndarray, y: np.ndarray, grid: SearchGrid, folds: int
) -> GridSearchResult:
    """Evaluate every grid cell by mean validation MSE across the folds.

    Ties break on (lower k_pca, lower C, kernel order rbf<linear<poly,
    "scale" then lower numeric gamma), making the selection total and
    reproducible.  Cells whose k_pca exceeds what the smallest fold can
    support are recorded as infeasible and never selected.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    fold_blocks = kfold_indices(n, folds)
    all_idx = np.arange(n)
    splits = []
    for val_idx in fold_blocks:
        train_idx = np.setdiff1d(all_idx, val_idx, assume_unique=True)
        splits.append((train_idx, val_idx))
    min_train = min(tr.size for tr, _ in splits)
    k_cap = min(min_train - 1, d)

    table: list[CvCell] = []
    for k in grid.k_pca_list:
        feasible = 1 <= k <= k_cap
        fold_models = []
        if feasible:
            for train_idx, _ in splits:
                scaler = fit_scaler(X[train_idx])
                Xs = scaler.transform(X[train_idx])
                pca = pca_fit(Xs, k)
                fold_models.append((scaler, pca))
        for kernel in grid.kernel_list:
            for c in grid.c_list:
                for gamma in grid.gamma_list:
                    if not feasible:
                        table.append(CvCell(k, kernel, c, gamma, [], float("inf"), False))
                        continue
                    params = SvrParams(
                        c=c,
                        gamma=gamma,
                        kernel=kernel,
                        epsilon=grid.epsilon,
                        tol=grid.tol,
                        max_iter=grid.max_iter,
                    )
                    mses = []
                    for (train_idx, val_idx), (scaler, pca) in zip(splits, fold_models):
                        Xt = pca_transform(pca, scaler.transform(X[train_idx]))
                        Xv = pca_transform(pca, scaler.transform(X[val_idx]))
                        model = svr_fit(Xt, y[train_idx], params)
                        resid = svr_predict(model, Xv) - y[val_idx]
                        mses.append(float(np.mean(resid**2)))
                    table.append(CvCell(k, kernel, c, gamma, mses, float(np.mean(mses)), True))

    feasible_cells = [c for c in table if c.feasible]
    if not feasible_cells:
        raise ValueError(
            f"no feasible grid cell: all k_pca exceed cap {k_cap} "
            f"(smallest fold train size {min_train}, {d} dims)"
        )
    best = min(feasible_cells, key=CvCell.sort_key)
    best_params = SvrParams(
        c=best.c,
        gamma=best.gamma,
        kernel=best.kernel,
        epsilon=grid.epsilon,
        tol=grid.tol,
        max_iter=grid.max_iter,
    )
    return GridSearchResult(best_params=best_params, best_k=best.k_pca, table=table)

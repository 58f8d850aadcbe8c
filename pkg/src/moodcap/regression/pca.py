"""Per-dimension standardization and principal component analysis.

PCA here is an eigen-decomposition of the sample covariance matrix of
standardized feature vectors.  Components are returned in descending
eigenvalue order with a deterministic sign convention so that fits are
byte-reproducible: the largest-magnitude element of each component is
made positive (first occurrence wins on ties).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Scaler:
    """Per-dimension mean and standard deviation fitted on training data."""

    mean: np.ndarray
    std: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.mean.shape[0]:
            raise ValueError(f"expected {self.mean.shape[0]} columns, got {X.shape[-1]}")
        return (X - self.mean) / self.std


def fit_scaler(X: np.ndarray) -> Scaler:
    """Fit a standardizer; constant dimensions keep std 1 to avoid 0/0."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("X must be a non-empty 2-D matrix")
    std = X.std(axis=0)
    std = np.where(std > 0.0, std, 1.0)
    return Scaler(mean=X.mean(axis=0), std=std)


@dataclass
class PcaModel:
    mean: np.ndarray  # d-vector, mean of the (already standardized) input
    components: np.ndarray  # k x d, rows orthonormal, descending eigenvalue
    explained_variance: np.ndarray  # k-vector, non-increasing, >= 0

    @property
    def k(self) -> int:
        return self.components.shape[0]


def pca_fit(X: np.ndarray, k: int) -> PcaModel:
    """Top-k eigenvectors of the sample covariance (n-1 denominator).

    Requires 1 <= k <= min(n-1, d): with n rows the covariance has rank
    at most n-1, so later components would be arbitrary basis choices.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-D")
    n, d = X.shape
    if n < 2:
        raise ValueError("need at least 2 rows to fit PCA")
    if not 1 <= k <= min(n - 1, d):
        raise ValueError(f"k={k} out of range [1, {min(n - 1, d)}] for shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("non-finite values in PCA input")

    mean = X.mean(axis=0)
    centered = X - mean
    cov = (centered.T @ centered) / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:k]
    components = eigvecs[:, order].T
    explained = np.maximum(eigvals[order], 0.0)  # clip eigh's tiny negatives

    for row in components:
        if row[np.argmax(np.abs(row))] < 0.0:
            row *= -1.0
    return PcaModel(mean=mean, components=components, explained_variance=explained)


def pca_transform(model: PcaModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != model.mean.shape[0]:
        raise ValueError(
            f"expected {model.mean.shape[0]} columns, got {X.shape[-1]}"
        )
    return (X - model.mean) @ model.components.T

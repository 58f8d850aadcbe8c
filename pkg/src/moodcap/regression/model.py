"""The deployable affect model: scaler + PCA + one SVR per dimension.

Serialized as a single JSON document with top-level keys
{scaler, pca, svr_valence, svr_arousal, config, format_version}.
Floats go through Python's repr (shortest decimal that round-trips
exactly), so save/load returns bit-identical parameters.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .evaluate import LabeledDataset, fit_split, search_split
from .gridsearch import SearchGrid
from .pca import PcaModel, Scaler, pca_transform
from .svr import SvrModel, SvrParams, svr_predict

FORMAT_VERSION = 1


@dataclass
class SerModel:
    scaler: Scaler
    pca: PcaModel
    valence_svr: SvrModel
    arousal_svr: SvrModel
    config: dict

    def __post_init__(self):
        k = self.pca.k
        for svr in (self.valence_svr, self.arousal_svr):
            if svr.support_vectors.size and svr.support_vectors.shape[1] != k:
                raise ValueError("SVR input width does not match PCA output width")


def train_ser(
    dataset: LabeledDataset,
    grid: SearchGrid = SearchGrid(),
    folds: int = 5,
) -> SerModel:
    """Grid-search on the full labeled set, then refit on all of it."""
    best_k, params, results = search_split(dataset, grid, folds)
    scaler, pca, svr_v, svr_a = fit_split(dataset, best_k, params)
    config = {
        "n_clips": len(dataset),
        "folds": folds,
        "k_pca": best_k,
        "params": {t: _params_to_dict(p) for t, p in params.items()},
        "cv_mse": {
            t: results[t].best_for_k(best_k).mean_mse for t in ("valence", "arousal")
        },
    }
    return SerModel(scaler, pca, svr_v, svr_a, config)


def predict_affect(model: SerModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(valence, arousal) predictions for 72-dim feature rows, unclamped."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    Xp = pca_transform(model.pca, model.scaler.transform(X))
    return svr_predict(model.valence_svr, Xp), svr_predict(model.arousal_svr, Xp)


def _params_to_dict(p: SvrParams) -> dict:
    return {
        "c": p.c,
        "gamma": p.gamma,
        "kernel": p.kernel,
        "epsilon": p.epsilon,
        "tol": p.tol,
        "max_iter": p.max_iter,
    }


def _params_from_dict(d: dict) -> SvrParams:
    return SvrParams(
        c=d["c"],
        gamma=d["gamma"],
        kernel=d["kernel"],
        epsilon=d["epsilon"],
        tol=d["tol"],
        max_iter=d["max_iter"],
    )


def _svr_to_dict(m: SvrModel) -> dict:
    return {
        "support_vectors": m.support_vectors.tolist(),
        "dual_coefs": m.dual_coefs.tolist(),
        "bias": m.bias,
        "params": _params_to_dict(m.params),
        "gamma_value": m.gamma_value,
    }


def _svr_from_dict(d: dict) -> SvrModel:
    sv = np.array(d["support_vectors"], dtype=np.float64)
    if sv.size == 0:
        sv = sv.reshape(0, 0)
    return SvrModel(
        support_vectors=sv,
        dual_coefs=np.array(d["dual_coefs"], dtype=np.float64),
        bias=d["bias"],
        params=_params_from_dict(d["params"]),
        gamma_value=d["gamma_value"],
    )


def save_model(model: SerModel, path: str | Path) -> None:
    doc = {
        "scaler": {"mean": model.scaler.mean.tolist(), "std": model.scaler.std.tolist()},
        "pca": {
            "mean": model.pca.mean.tolist(),
            "components": model.pca.components.tolist(),
            "explained_variance": model.pca.explained_variance.tolist(),
        },
        "svr_valence": _svr_to_dict(model.valence_svr),
        "svr_arousal": _svr_to_dict(model.arousal_svr),
        "config": model.config,
        "format_version": FORMAT_VERSION,
    }
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, ensure_ascii=False, indent=1)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_model(path: str | Path) -> SerModel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format_version {version!r}")
    return SerModel(
        scaler=Scaler(
            mean=np.array(doc["scaler"]["mean"], dtype=np.float64),
            std=np.array(doc["scaler"]["std"], dtype=np.float64),
        ),
        pca=PcaModel(
            mean=np.array(doc["pca"]["mean"], dtype=np.float64),
            components=np.array(doc["pca"]["components"], dtype=np.float64),
            explained_variance=np.array(doc["pca"]["explained_variance"], dtype=np.float64),
        ),
        valence_svr=_svr_from_dict(doc["svr_valence"]),
        arousal_svr=_svr_from_dict(doc["svr_arousal"]),
        config=doc["config"],
    )


def load_labels_csv(path: str | Path) -> dict[str, tuple[float, float]]:
    """Clip labels from a (filename, valence, arousal) CSV.

    Keys are the filename column minus its extension.  A header row is
    tolerated: the first row is skipped when its numeric columns do not
    parse.  Labels outside [-1, 1] are rejected.
    """
    out: dict[str, tuple[float, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row_no, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < 3:
                raise ValueError(f"{path}:{row_no}: expected 3 columns, got {len(row)}")
            name = row[0].strip()
            try:
                valence, arousal = float(row[1]), float(row[2])
            except ValueError:
                if row_no == 1:
                    continue  # header
                raise ValueError(f"{path}:{row_no}: non-numeric label") from None
            if not (-1.0 <= valence <= 1.0 and -1.0 <= arousal <= 1.0):
                raise ValueError(f"{path}:{row_no}: labels must lie in [-1, 1]")
            key = name.rsplit(".", 1)[0] if "." in Path(name).name else name
            if key in out:
                raise ValueError(f"{path}:{row_no}: duplicate clip {key!r}")
            out[key] = (valence, arousal)
    if not out:
        raise ValueError(f"{path}: no label rows found")
    return out


def join_features_labels(
    features: list, labels: dict[str, tuple[float, float]]
) -> LabeledDataset:
    """Align FeatureVectors with labels by clip_id, falling back to basename."""
    ids, rows, vals, ars = [], [], [], []
    for fv in features:
        lab = labels.get(fv.clip_id)
        if lab is None:
            lab = labels.get(fv.clip_id.rsplit("/", 1)[-1])
        if lab is None:
            continue
        ids.append(fv.clip_id)
        rows.append(fv.values)
        vals.append(lab[0])
        ars.append(lab[1])
    if not ids:
        raise ValueError("no feature clip_ids matched the label table")
    return LabeledDataset(ids, np.vstack(rows), np.array(vals), np.array(ars))

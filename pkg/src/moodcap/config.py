"""Structured pipeline configuration loaded from a YAML file.

Every section is optional and falls back to the package defaults, but
unknown keys anywhere are hard errors: a typoed setting must never be
silently ignored.  Paths inside the file (currently the caption cache
directory) resolve relative to the file's own location, so a config can
move with its working tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .dsp.features import DspConfig
from .prompting.client import LlmConfig
from .regression.gridsearch import SearchGrid


class ConfigError(ValueError):
    """A config file that cannot be accepted as written."""


@dataclass
class TrialSettings:
    count: int = 100
    base_seed: int = 0
    search_each_trial: bool = True


@dataclass
class PipelineConfig:
    dsp: DspConfig = field(default_factory=DspConfig)
    grid: SearchGrid = field(default_factory=SearchGrid)
    folds: int = 5
    trials: TrialSettings = field(default_factory=TrialSettings)
    llm: LlmConfig = field(default_factory=LlmConfig)
    unqualified_mood: bool = False


def _section(doc: dict, name: str, known: tuple[str, ...]) -> dict:
    raw = doc.pop(name, None)
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    unknown = set(raw) - set(known)
    if unknown:
        raise ConfigError(f"unknown key(s) in {name!r}: {sorted(unknown)}")
    return raw


def _grid_from(raw: dict) -> tuple[SearchGrid, int]:
    folds = raw.pop("folds", 5)
    kwargs = {}
    if "c" in raw:
        kwargs["c_list"] = tuple(float(v) for v in raw["c"])
    if "gamma" in raw:
        kwargs["gamma_list"] = tuple(
            v if v == "scale" else float(v) for v in raw["gamma"]
        )
    if "kernels" in raw:
        kwargs["kernel_list"] = tuple(raw["kernels"])
    if "k_pca" in raw:
        kwargs["k_pca_list"] = tuple(int(v) for v in raw["k_pca"])
    for key in ("epsilon", "tol"):
        if key in raw:
            kwargs[key] = float(raw[key])
    if "max_iter" in raw:
        kwargs["max_iter"] = int(raw["max_iter"])
    try:
        return SearchGrid(**kwargs), int(folds)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None


def load_config(path: str | Path | None) -> PipelineConfig:
    """Parse and validate a config file; None loads pure defaults."""
    if path is None:
        return PipelineConfig()
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    if doc is None:
        return PipelineConfig()
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    dsp_raw = _section(
        doc,
        "dsp",
        (
            "sample_rate", "frame_len", "hop", "n_mels", "n_mfcc", "fmin", "fmax",
            "delta_width", "contrast_fmin", "contrast_bands", "contrast_quantile",
        ),
    )
    grid_raw = _section(
        doc, "grid", ("c", "gamma", "kernels", "k_pca", "epsilon", "tol", "max_iter", "folds")
    )
    trials_raw = _section(doc, "trials", ("count", "base_seed", "search_each_trial"))
    llm_raw = _section(
        doc,
        "llm",
        (
            "endpoint", "model", "temperature", "max_inflight", "max_attempts",
            "backoff_base", "cache_dir",
        ),
    )
    circ_raw = _section(doc, "circumplex", ("unqualified_mood",))
    if doc:
        raise ConfigError(f"{path}: unknown section(s): {sorted(doc)}")

    try:
        dsp = DspConfig(**dsp_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"dsp: {exc}") from None
    grid, folds = _grid_from(dict(grid_raw))
    trials = TrialSettings(**trials_raw)

    if "cache_dir" in llm_raw:
        llm_raw = dict(llm_raw)
        llm_raw["cache_dir"] = str((path.parent / llm_raw["cache_dir"]).resolve())
    try:
        llm = LlmConfig(**llm_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"llm: {exc}") from None

    return PipelineConfig(
        dsp=dsp,
        grid=grid,
        folds=folds,
        trials=trials,
        llm=llm,
        unqualified_mood=bool(circ_raw.get("unqualified_mood", False)),
    )

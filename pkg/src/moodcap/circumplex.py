"""Discretize (valence, arousal) into qualified soundscape emotions.

Eight emotion axes sit every 45 degrees on the unit circle, valence on x
and arousal on y, starting at pleasant = 0 degrees and proceeding
counterclockwise: exciting, eventful, chaotic, unpleasant, boring,
uneventful, quiet.  A point takes the axis with the highest cosine
similarity, keeps the dot-product projection onto it, and gets an
intensity qualifier from the magnitude's percentile within a corpus:

    p < 0.15          neutral      rendered "neutral"
    0.15 <= p < 0.50  slightly     rendered "slightly <emotion>"
    0.50 <= p < 0.85  plain        rendered "<emotion>"
    0.85 <= p <= 1.0  highly       rendered "highly <emotion>"

The zero vector has no direction; it is always rendered "neutral".
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

QUALIFIERS = ("neutral", "slightly", "plain", "highly")
NEUTRAL_MAX_P = 0.15
SLIGHTLY_MAX_P = 0.50
PLAIN_MAX_P = 0.85

_H = math.sqrt(0.5)


@dataclass(frozen=True)
class EmotionAxis:
    name: str
    unit_vector: tuple[float, float]


EMOTION_AXES: tuple[EmotionAxis, ...] = (
    EmotionAxis("pleasant", (1.0, 0.0)),
    EmotionAxis("exciting", (_H, _H)),
    EmotionAxis("eventful", (0.0, 1.0)),
    EmotionAxis("chaotic", (-_H, _H)),
    EmotionAxis("unpleasant", (-1.0, 0.0)),
    EmotionAxis("boring", (-_H, -_H)),
    EmotionAxis("uneventful", (0.0, -1.0)),
    EmotionAxis("quiet", (_H, -_H)),
)

EMOTION_NAMES = tuple(a.name for a in EMOTION_AXES)


@dataclass(frozen=True)
class AffectPoint:
    """A point on the affect plane; out-of-range inputs clamp to [-1, 1]."""

    valence: float
    arousal: float

    def __post_init__(self):
        if not (math.isfinite(self.valence) and math.isfinite(self.arousal)):
            raise ValueError("affect coordinates must be finite")
        object.__setattr__(self, "valence", min(1.0, max(-1.0, self.valence)))
        object.__setattr__(self, "arousal", min(1.0, max(-1.0, self.arousal)))

    def is_zero(self) -> bool:
        return self.valence == 0.0 and self.arousal == 0.0


@dataclass(frozen=True)
class QualifiedEmotion:
    emotion: str | None  # None only for the zero vector
    qualifier: str
    magnitude: float
    percentile: float
    text: str


def nearest_emotion(a: AffectPoint) -> EmotionAxis | None:
    """Axis with maximal cosine similarity; the zero vector has none.

    Ties at exact sector boundaries go to the smaller angle, which is the
    first axis in counterclockwise order from 0 degrees.
    """
    if a.is_zero():
        return None
    best, best_cos = None, -math.inf
    norm = math.hypot(a.valence, a.arousal)
    for axis in EMOTION_AXES:
        cos = (a.valence * axis.unit_vector[0] + a.arousal * axis.unit_vector[1]) / norm
        if cos > best_cos:
            best, best_cos = axis, cos
    return best


def projection_magnitude(a: AffectPoint, e: EmotionAxis) -> float:
    return a.valence * e.unit_vector[0] + a.arousal * e.unit_vector[1]


@dataclass(frozen=True)
class MagnitudeDistribution:
    """Sorted corpus sample of projection magnitudes."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.sort(np.asarray(self.samples, dtype=np.float64))
        if arr.size < 1:
            raise ValueError("distribution needs at least one sample")
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite magnitude in distribution")
        object.__setattr__(self, "samples", arr)

    @property
    def count(self) -> int:
        return int(self.samples.size)


def percentile_of(d: MagnitudeDistribution, m: float) -> float:
    """Empirical CDF: fraction of corpus samples <= m."""
    return float(np.searchsorted(d.samples, m, side="right")) / d.count


def qualify(e: EmotionAxis | None, p: float, magnitude: float = 0.0) -> QualifiedEmotion:
    """Attach the percentile band's qualifier and render the label text."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"percentile {p} outside [0, 1]")
    if e is None:
        return QualifiedEmotion(None, "neutral", magnitude, p, "neutral")
    if p < NEUTRAL_MAX_P:
        qualifier, text = "neutral", "neutral"
    elif p < SLIGHTLY_MAX_P:
        qualifier, text = "slightly", f"slightly {e.name}"
    elif p < PLAIN_MAX_P:
        qualifier, text = "plain", e.name
    else:
        qualifier, text = "highly", f"highly {e.name}"
    return QualifiedEmotion(e.name, qualifier, magnitude, p, text)


def corpus_distribution(affects: list[AffectPoint]) -> MagnitudeDistribution:
    """Pass 1: nearest-axis projection magnitude of every point, sorted.

    Zero vectors contribute magnitude 0 so the distribution covers the
    whole corpus being labeled.
    """
    if not affects:
        raise ValueError("empty corpus")
    mags = []
    for a in affects:
        e = nearest_emotion(a)
        mags.append(0.0 if e is None else projection_magnitude(a, e))
    return MagnitudeDistribution(np.array(mags))


def qualify_corpus(
    affects: list[AffectPoint], distribution: MagnitudeDistribution | None = None
) -> list[QualifiedEmotion]:
    """Label every point; the percentile corpus defaults to the input itself."""
    if distribution is None:
        distribution = corpus_distribution(affects)
    out = []
    for a in affects:
        e = nearest_emotion(a)
        mag = 0.0 if e is None else projection_magnitude(a, e)
        out.append(qualify(e, percentile_of(distribution, mag), mag))
    return out


def save_distribution(d: MagnitudeDistribution, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"magnitudes": d.samples.tolist()}, fh)
        fh.write("\n")


def load_distribution(path: str | Path) -> MagnitudeDistribution:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return MagnitudeDistribution(np.array(doc["magnitudes"], dtype=np.float64))


def emotion_record(clip_id: str, a: AffectPoint, q: QualifiedEmotion) -> dict:
    """The JSONL row shape shared by the labeler and the dataset builder."""
    return {
        "clip_id": clip_id,
        "valence": a.valence,
        "arousal": a.arousal,
        "emotion": q.emotion,
        "qualifier": q.qualifier,
        "magnitude": q.magnitude,
        "percentile": q.percentile,
        "text": q.text,
    }

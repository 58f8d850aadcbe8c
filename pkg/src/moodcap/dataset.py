"""Assemble per-clip artifacts into caption records and report statistics.

A record joins, by clip_id, the event timeline, the predicted affect
point, the qualified emotion, and the generated caption for one prompt
variant.  The join is inner: clips missing from any input are skipped
and counted, never fabricated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .circumplex import AffectPoint, QualifiedEmotion
from .events import EventTimeline
from .jsonio import JsonlError, dump_jsonl, load_jsonl
from .prompting.templates import VARIANTS
from .prompting.validation import CaptionResult, validate_caption
from .text import word_count

FLAG_NAMES = ("empty", "too_long", "contains_heard", "multi_sentence")


@dataclass(frozen=True)
class CaptionRecord:
    clip_id: str
    events: tuple[str, ...]
    valence: float | None  # None when assembled without affect inputs
    arousal: float | None
    emotion_text: str | None
    variant: str
    caption: str
    num_words: int

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.num_words != word_count(self.caption):
            raise ValueError(
                f"clip {self.clip_id!r}: num_words {self.num_words} does not match "
                f"the caption's whitespace token count {word_count(self.caption)}"
            )


def assemble(
    timelines: dict[str, EventTimeline],
    affects: dict[str, AffectPoint],
    qualified: dict[str, QualifiedEmotion],
    captions: list[CaptionResult] | dict[str, CaptionResult],
    variant: str,
) -> tuple[list[CaptionRecord], int]:
    """Inner-join the four per-clip inputs; returns (records, skipped).

    skipped counts every clip_id that appears somewhere but not in all
    four inputs.  Output is sorted by clip_id regardless of input order.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if not isinstance(captions, dict):
        by_id: dict[str, CaptionResult] = {}
        for c in captions:
            if c.clip_id in by_id:
                raise ValueError(f"duplicate caption for clip {c.clip_id!r}")
            by_id[c.clip_id] = c
        captions = by_id

    keys = [set(timelines), set(affects), set(qualified), set(captions)]
    shared = sorted(set.intersection(*keys))
    skipped = len(set.union(*keys)) - len(shared)

    records = []
    for clip_id in shared:
        cap = captions[clip_id]
        if cap.variant != variant:
            raise ValueError(
                f"clip {clip_id!r} caption is variant {cap.variant!r}, expected {variant!r}"
            )
        records.append(
            CaptionRecord(
                clip_id=clip_id,
                events=tuple(timelines[clip_id].events),
                valence=affects[clip_id].valence,
                arousal=affects[clip_id].arousal,
                emotion_text=qualified[clip_id].text,
                variant=variant,
                caption=cap.caption,
                num_words=cap.word_count,
            )
        )
    return records, skipped


def assemble_without_affect(
    timelines: dict[str, EventTimeline],
    captions: list[CaptionResult] | dict[str, CaptionResult],
    variant: str,
) -> tuple[list[CaptionRecord], int]:
    """Join for runs that never predicted affect; those fields stay null."""
    if not isinstance(captions, dict):
        by_id = {}
        for c in captions:
            if c.clip_id in by_id:
                raise ValueError(f"duplicate caption for clip {c.clip_id!r}")
            by_id[c.clip_id] = c
        captions = by_id
    shared = sorted(set(timelines) & set(captions))
    skipped = len(set(timelines) | set(captions)) - len(shared)
    records = []
    for clip_id in shared:
        cap = captions[clip_id]
        if cap.variant != variant:
            raise ValueError(
                f"clip {clip_id!r} caption is variant {cap.variant!r}, expected {variant!r}"
            )
        records.append(
            CaptionRecord(
                clip_id=clip_id,
                events=tuple(timelines[clip_id].events),
                valence=None,
                arousal=None,
                emotion_text=None,
                variant=variant,
                caption=cap.caption,
                num_words=cap.word_count,
            )
        )
    return records, skipped


def write_records_jsonl(records: list[CaptionRecord], path: str | Path) -> None:
    dump_jsonl(
        (
            {
                "clip_id": r.clip_id,
                "events": list(r.events),
                "valence": r.valence,
                "arousal": r.arousal,
                "emotion_text": r.emotion_text,
                "variant": r.variant,
                "caption": r.caption,
                "num_words": r.num_words,
            }
            for r in records
        ),
        path,
    )


def read_records_jsonl(path: str | Path) -> list[CaptionRecord]:
    records = []
    for line_no, obj in enumerate(load_jsonl(path), start=1):
        try:
            records.append(
                CaptionRecord(
                    clip_id=obj["clip_id"],
                    events=tuple(obj["events"]),
                    valence=obj["valence"],
                    arousal=obj["arousal"],
                    emotion_text=obj["emotion_text"],
                    variant=obj["variant"],
                    caption=obj["caption"],
                    num_words=obj["num_words"],
                )
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise JsonlError(path, line_no, str(exc)) from None
    return records


@dataclass(frozen=True)
class SubsetStats:
    variant: str
    clip_count: int
    mean_words: float
    sd_words: float  # population standard deviation
    flag_rates: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "clip_count": self.clip_count,
            "mean_words": self.mean_words,
            "sd_words": self.sd_words,
            "flag_rates": dict(self.flag_rates),
        }


def subset_stats(records: list[CaptionRecord]) -> SubsetStats:
    """Word-count mean/sd and flag rates for a single-variant subset."""
    if not records:
        raise ValueError("cannot compute statistics over zero records")
    variants = {r.variant for r in records}
    if len(variants) != 1:
        raise ValueError(f"records mix variants: {sorted(variants)}")

    counts = [r.num_words for r in records]
    n = len(counts)
    mean = sum(counts) / n
    sd = math.sqrt(sum((c - mean) ** 2 for c in counts) / n)

    flag_totals = dict.fromkeys(FLAG_NAMES, 0)
    for r in records:
        flags = validate_caption(r.caption).to_dict()
        for name in FLAG_NAMES:
            flag_totals[name] += int(flags[name])
    return SubsetStats(
        variant=variants.pop(),
        clip_count=n,
        mean_words=mean,
        sd_words=sd,
        flag_rates={name: flag_totals[name] / n for name in FLAG_NAMES},
    )


def stats_table(stats: list[SubsetStats]) -> str:
    """Aligned text table, one row per subset."""
    headers = ("variant", "clips", "mean_words", "sd_words") + tuple(
        f"{n}_rate" for n in FLAG_NAMES
    )
    rows = [
        (
            s.variant,
            str(s.clip_count),
            f"{s.mean_words:.2f}",
            f"{s.sd_words:.2f}",
            *(f"{s.flag_rates[n]:.3f}" for n in FLAG_NAMES),
        )
        for s in stats
    ]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines)

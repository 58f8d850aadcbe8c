"""Strong-label annotations to per-clip sound-event timelines.

Input is the AudioSet-SL TSV layout (segment_id, start_time_seconds,
end_time_seconds, label) plus the ontology JSON mapping machine ids to
display names.  A clip's timeline is its segments sorted by
(onset, offset, display name) with only the first occurrence of each
display name kept, so the list reads as "what you hear, in order,
without repeats".
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

from .jsonio import dump_jsonl, load_jsonl

TSV_COLUMNS = ("segment_id", "start_time_seconds", "end_time_seconds", "label")


class StrongLabelError(ValueError):
    """Malformed strong-label TSV row, with its line number."""


@dataclass(frozen=True)
class EventSegment:
    clip_id: str
    onset: float
    offset: float
    label_mid: str

    def __post_init__(self):
        if self.onset < 0.0 or self.offset <= self.onset:
            raise ValueError(
                f"segment needs 0 <= onset < offset, got [{self.onset}, {self.offset}]"
            )


@dataclass(frozen=True)
class Ontology:
    names: dict[str, str]  # machine id -> display name

    def __getitem__(self, mid: str) -> str:
        return self.names[mid]

    def __contains__(self, mid: str) -> bool:
        return mid in self.names

    def __len__(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class EventTimeline:
    clip_id: str
    events: tuple[str, ...]  # unique display names, first-occurrence order
    onsets: tuple[float, ...]  # parallel first-occurrence onsets, non-decreasing


def parse_strong_labels(
    stream: TextIO | str | Path, strict: bool = True
) -> tuple[list[EventSegment], int]:
    """Segments from a strong-label TSV, plus the count of skipped rows.

    Strict mode raises on the first malformed row, naming its line;
    lenient mode skips such rows and counts them (the count is always 0
    when strict).  The header row is required.
    """
    if isinstance(stream, (str, Path)):
        with open(stream, newline="", encoding="utf-8") as fh:
            return parse_strong_labels(fh, strict=strict)

    reader = csv.reader(stream, delimiter="\t")
    try:
        header = next(reader)
    except StopIteration:
        raise StrongLabelError("empty strong-label file: missing header") from None
    if tuple(h.strip() for h in header[:4]) != TSV_COLUMNS:
        raise StrongLabelError(
            f"line 1: expected header {list(TSV_COLUMNS)}, got {header[:4]}"
        )

    segments: list[EventSegment] = []
    skipped = 0
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            if len(row) < 4:
                raise ValueError(f"expected 4 columns, got {len(row)}")
            segments.append(
                EventSegment(row[0], float(row[1]), float(row[2]), row[3].strip())
            )
        except ValueError as exc:
            if strict:
                raise StrongLabelError(f"line {line_no}: {exc}") from None
            skipped += 1
    return segments, skipped


def parse_ontology(stream: TextIO | str | Path) -> Ontology:
    """Ontology from a JSON array of objects with "id" and "name"."""
    if isinstance(stream, (str, Path)):
        with open(stream, encoding="utf-8") as fh:
            return parse_ontology(fh)
    doc = json.load(stream)
    if not isinstance(doc, list):
        raise ValueError("ontology must be a JSON array")
    names: dict[str, str] = {}
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict) or "id" not in entry or "name" not in entry:
            raise ValueError(f"ontology entry {i} lacks id/name")
        mid, name = entry["id"], entry["name"]
        if not name:
            raise ValueError(f"ontology entry {i} has an empty name")
        if mid in names:
            raise ValueError(f"duplicate ontology id {mid!r}")
        names[mid] = name
    return Ontology(names)


def build_timeline(
    segments: Iterable[EventSegment], ontology: Ontology, strict: bool = True
) -> EventTimeline:
    """First chronological occurrence of each unique display name.

    Unknown machine ids raise in strict mode; lenient mode keeps the raw
    id as the display name.
    """
    segments = list(segments)
    if not segments:
        raise ValueError("cannot build a timeline from zero segments")
    clip_ids = {s.clip_id for s in segments}
    if len(clip_ids) != 1:
        raise ValueError(f"segments span multiple clips: {sorted(clip_ids)}")

    def display(mid: str) -> str:
        if mid in ontology:
            return ontology[mid]
        if strict:
            raise KeyError(f"unknown ontology id {mid!r} in clip {segments[0].clip_id}")
        return mid

    named = sorted(
        ((s.onset, s.offset, display(s.label_mid)) for s in segments),
        key=lambda t: (t[0], t[1], t[2]),
    )
    events: list[str] = []
    onsets: list[float] = []
    seen: set[str] = set()
    for onset, _, name in named:
        if name not in seen:
            seen.add(name)
            events.append(name)
            onsets.append(onset)
    return EventTimeline(segments[0].clip_id, tuple(events), tuple(onsets))


def build_corpus_timelines(
    tsv: TextIO | str | Path,
    ontology_src: TextIO | str | Path,
    strict: bool = True,
) -> dict[str, EventTimeline]:
    """Every clip's timeline, keyed and ordered by clip_id."""
    segments, _ = parse_strong_labels(tsv, strict=strict)
    ontology = parse_ontology(ontology_src)
    by_clip: dict[str, list[EventSegment]] = {}
    for seg in segments:
        by_clip.setdefault(seg.clip_id, []).append(seg)
    return {
        clip_id: build_timeline(by_clip[clip_id], ontology, strict=strict)
        for clip_id in sorted(by_clip)
    }


def write_timelines_jsonl(timelines: dict[str, EventTimeline], path: str | Path) -> None:
    dump_jsonl(
        (
            {"clip_id": t.clip_id, "events": list(t.events), "onsets": list(t.onsets)}
            for t in (timelines[k] for k in sorted(timelines))
        ),
        path,
    )


def read_timelines_jsonl(path: str | Path) -> dict[str, EventTimeline]:
    out: dict[str, EventTimeline] = {}
    for obj in load_jsonl(path):
        out[obj["clip_id"]] = EventTimeline(
            obj["clip_id"], tuple(obj["events"]), tuple(obj["onsets"])
        )
    return out

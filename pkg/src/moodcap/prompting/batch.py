"""Corpus-scale caption generation with bounded concurrency.

Clips are dispatched to a thread pool (the mock backend and HTTP calls
both release the GIL or block on IO), results are collected whenever
they finish, and the output is sorted by clip_id at the end so a run
with 8 workers is byte-identical to a run with 1.  Per-clip failures
are recorded in the manifest instead of aborting the batch, unless
fail_fast is set.

The emotion_rewrite variant is a two-step conversation per clip: the
scene-focused caption is generated (or served from cache, shared with
plain scene_focused runs) and then fed back as the sentence to rewrite.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..circumplex import QualifiedEmotion
from ..events import EventTimeline
from .client import CompletionError, GenerateOutcome, LlmClient
from .templates import EMOTION_VARIANTS, VARIANTS, render_prompt
from .validation import CaptionResult


@dataclass
class RunManifest:
    """Counts for one corpus run; requested = cached + fetched + failed."""

    variant: str
    requested: int = 0
    cached: int = 0  # every completion for the clip came from cache
    fetched: int = 0  # at least one completion hit the backend
    failed: int = 0
    flagged: int = 0
    retries: int = 0
    failures: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "requested": self.requested,
            "cached": self.cached,
            "fetched": self.fetched,
            "failed": self.failed,
            "flagged": self.flagged,
            "retries": self.retries,
            "failures": dict(sorted(self.failures.items())),
        }


def _caption_clip(
    client: LlmClient,
    variant: str,
    timeline: EventTimeline,
    emotion: QualifiedEmotion | None,
    unqualified_mood: bool,
) -> GenerateOutcome:
    if variant != "emotion_rewrite":
        exchange = render_prompt(variant, timeline, emotion, unqualified_mood=unqualified_mood)
        return client.generate(timeline.clip_id, exchange)

    scene = client.generate(
        timeline.clip_id, render_prompt("scene_focused", timeline)
    )
    rewrite = client.generate(
        timeline.clip_id,
        render_prompt(
            "emotion_rewrite",
            timeline,
            emotion,
            prior_caption=scene.result.caption,
            unqualified_mood=unqualified_mood,
        ),
    )
    return GenerateOutcome(
        result=rewrite.result,
        from_cache=scene.from_cache and rewrite.from_cache,
        retries=scene.retries + rewrite.retries,
    )


def generate_corpus(
    timelines: dict[str, EventTimeline],
    emotions: dict[str, QualifiedEmotion] | None,
    variant: str,
    client: LlmClient,
    clip_ids: list[str] | None = None,
    jobs: int = 1,
    fail_fast: bool = False,
    unqualified_mood: bool = False,
) -> tuple[list[CaptionResult], RunManifest]:
    """Caption every requested clip; returns results sorted by clip_id."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    requested = sorted(clip_ids) if clip_ids is not None else sorted(timelines)

    missing = [c for c in requested if c not in timelines]
    if missing:
        raise ValueError(f"no event timeline for clips: {missing[:5]}")
    needs_emotion = variant in EMOTION_VARIANTS
    if needs_emotion:
        if emotions is None:
            raise ValueError(f"variant {variant} requires emotion labels")
        lacking = [c for c in requested if c not in emotions]
        if lacking:
            raise ValueError(f"no emotion label for clips: {lacking[:5]}")

    manifest = RunManifest(variant=variant, requested=len(requested))

    def work(clip_id: str) -> tuple[str, GenerateOutcome | Exception]:
        try:
            outcome = _caption_clip(
                client,
                variant,
                timelines[clip_id],
                emotions[clip_id] if needs_emotion else None,
                unqualified_mood,
            )
            return clip_id, outcome
        except (CompletionError, ValueError) as exc:
            if fail_fast:
                raise
            return clip_id, exc

    if jobs == 1:
        settled = [work(c) for c in requested]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            settled = list(pool.map(work, requested))

    results: list[CaptionResult] = []
    for clip_id, outcome in settled:
        if isinstance(outcome, Exception):
            manifest.failed += 1
            manifest.failures[clip_id] = str(outcome)
            if isinstance(outcome, CompletionError):
                manifest.retries += max(0, outcome.attempts - 1)
            continue
        results.append(outcome.result)
        manifest.retries += outcome.retries
        if outcome.from_cache:
            manifest.cached += 1
        else:
            manifest.fetched += 1
        if outcome.result.flags.any():
            manifest.flagged += 1

    results.sort(key=lambda r: r.clip_id)
    return results, manifest

"""The four caption-prompt variants and their message layouts.

Instruction wording is frozen; golden tests compare it byte-for-byte.
A request renders as the instruction, then the event list on its own
line in bracketed single-quote style, then (when a mood is sent) a
final line "Mood: <text>".  The rewrite variant is a two-step
conversation: the scene-focused request, the assistant's caption, and
a second user turn carrying the rewrite instruction, the sentence to
rewrite, and the mood line.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..circumplex import QualifiedEmotion
from ..events import EventTimeline

VARIANTS = ("wavcaps", "scene_focused", "emotion_addon", "emotion_rewrite")
EMOTION_VARIANTS = ("emotion_addon", "emotion_rewrite")

WAVCAPS_INSTRUCTION = (
    "I will give you a number of lists containing sound events occurred "
    "sequentially in time. Process each individually. Write a one-sentence "
    "audio caption to describe these sounds. Make sure you are using "
    "grammatical subject-verb-object sentences. Directly describe the sounds "
    'and avoid using the word "heard". The caption should be less than 20 words.'
)

SCENE_FOCUSED_INSTRUCTION = (
    "I will provide a list containing chronological sound events of an "
    "auditory scene. Write a one-sentence audio caption to describe the "
    "scene. Make sure to use an active voice. Describe the scene without "
    "simply listing the sounds. The caption should be less than 20 words."
)

EMOTION_ADDON_INSTRUCTION = (
    "I will also provide a mood. Please emphasize this mood in your caption."
)

EMOTION_REWRITE_INSTRUCTION = (
    "I will give you a sentence describing a sound scene, and a mood. "
    "Please rewrite the sentence, emphasizing the indicated mood."
)

INSTRUCTIONS = {
    "wavcaps": WAVCAPS_INSTRUCTION,
    "scene_focused": SCENE_FOCUSED_INSTRUCTION,
    "emotion_addon": EMOTION_ADDON_INSTRUCTION,
    "emotion_rewrite": EMOTION_REWRITE_INSTRUCTION,
}


@dataclass(frozen=True)
class ChatMessage:
    role: str  # system | user | assistant
    content: str

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"bad role {self.role!r}")
        if not self.content:
            raise ValueError("empty message content")


@dataclass(frozen=True)
class ChatExchange:
    variant: str
    messages: tuple[ChatMessage, ...]

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if not self.messages:
            raise ValueError("empty exchange")


def render_event_list(events: tuple[str, ...] | list[str]) -> str:
    """['Thunder', 'Rain on surface'] style; embedded quotes get escaped."""
    quoted = ", ".join("'" + name.replace("'", "\\'") + "'" for name in events)
    return f"[{quoted}]"


def mood_text(emotion: QualifiedEmotion, unqualified: bool = False) -> str:
    """The mood string sent to the model, optionally without its qualifier."""
    if unqualified:
        return emotion.emotion if emotion.emotion else "neutral"
    return emotion.text


def render_prompt(
    variant: str,
    events: EventTimeline,
    emotion: QualifiedEmotion | None = None,
    prior_caption: str | None = None,
    unqualified_mood: bool = False,
) -> ChatExchange:
    """Build the full message list for one clip under one variant."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if not events.events:
        raise ValueError(f"clip {events.clip_id!r} has an empty event list")
    if variant in EMOTION_VARIANTS and emotion is None:
        raise ValueError(f"variant {variant} requires an emotion")

    event_line = render_event_list(events.events)

    if variant == "wavcaps":
        content = f"{WAVCAPS_INSTRUCTION}\n{event_line}"
        return ChatExchange(variant, (ChatMessage("user", content),))

    if variant == "scene_focused":
        content = f"{SCENE_FOCUSED_INSTRUCTION}\n{event_line}"
        return ChatExchange(variant, (ChatMessage("user", content),))

    if variant == "emotion_addon":
        mood = mood_text(emotion, unqualified_mood)
        content = (
            f"{SCENE_FOCUSED_INSTRUCTION} {EMOTION_ADDON_INSTRUCTION}"
            f"\n{event_line}\nMood: {mood}"
        )
        return ChatExchange(variant, (ChatMessage("user", content),))

    # emotion_rewrite: scene turn, the model's caption, then the rewrite turn
    if prior_caption is None:
        raise ValueError("emotion_rewrite requires the scene-focused caption")
    mood = mood_text(emotion, unqualified_mood)
    scene_content = f"{SCENE_FOCUSED_INSTRUCTION}\n{event_line}"
    rewrite_content = f"{EMOTION_REWRITE_INSTRUCTION}\n{prior_caption}\nMood: {mood}"
    return ChatExchange(
        variant,
        (
            ChatMessage("user", scene_content),
            ChatMessage("assistant", prior_caption),
            ChatMessage("user", rewrite_content),
        ),
    )

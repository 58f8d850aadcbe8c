"""Prompt rendering, LLM access with caching, and caption validation."""

from .batch import RunManifest, generate_corpus
from .client import (
    API_KEY_ENV,
    CompletionError,
    EmptyCompletionError,
    GenerateOutcome,
    HttpChatBackend,
    LlmClient,
    LlmConfig,
    MockChatBackend,
    TransientBackendError,
    mock_caption,
)
from .templates import (
    EMOTION_ADDON_INSTRUCTION,
    EMOTION_REWRITE_INSTRUCTION,
    EMOTION_VARIANTS,
    INSTRUCTIONS,
    SCENE_FOCUSED_INSTRUCTION,
    VARIANTS,
    WAVCAPS_INSTRUCTION,
    ChatExchange,
    ChatMessage,
    mood_text,
    render_event_list,
    render_prompt,
)
from .validation import (
    TOO_LONG_WORDS,
    CaptionFlags,
    CaptionResult,
    normalize_caption,
    validate_caption,
)

__all__ = [
    "API_KEY_ENV",
    "CaptionFlags",
    "CaptionResult",
    "ChatExchange",
    "ChatMessage",
    "CompletionError",
    "EMOTION_ADDON_INSTRUCTION",
    "EMOTION_REWRITE_INSTRUCTION",
    "EMOTION_VARIANTS",
    "EmptyCompletionError",
    "GenerateOutcome",
    "HttpChatBackend",
    "INSTRUCTIONS",
    "LlmClient",
    "LlmConfig",
    "MockChatBackend",
    "RunManifest",
    "SCENE_FOCUSED_INSTRUCTION",
    "TOO_LONG_WORDS",
    "TransientBackendError",
    "VARIANTS",
    "WAVCAPS_INSTRUCTION",
    "generate_corpus",
    "mock_caption",
    "mood_text",
    "normalize_caption",
    "render_event_list",
    "render_prompt",
    "validate_caption",
]

"""Caption normalization and quality flags.

Flags are always recomputed from the caption text; nothing the model
reports about itself is trusted.  The word count is the shared
whitespace-token rule used everywhere in this package.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

from ..text import word_count, words

TOO_LONG_WORDS = 20  # the prompt asks for under 20 words
_TERMINAL_MARKS = ".!?"


@dataclass(frozen=True)
class CaptionFlags:
    empty: bool
    too_long: bool
    contains_heard: bool
    multi_sentence: bool

    def any(self) -> bool:
        return self.empty or self.too_long or self.contains_heard or self.multi_sentence

    def to_dict(self) -> dict[str, bool]:
        return {
            "empty": self.empty,
            "too_long": self.too_long,
            "contains_heard": self.contains_heard,
            "multi_sentence": self.multi_sentence,
        }


def validate_caption(caption: str) -> CaptionFlags:
    tokens = words(caption)
    heard = any(t.strip(string.punctuation).lower() == "heard" for t in tokens)
    terminal = sum(caption.count(m) for m in _TERMINAL_MARKS)
    return CaptionFlags(
        empty=not tokens,
        too_long=len(tokens) >= TOO_LONG_WORDS,
        contains_heard=heard,
        multi_sentence=terminal > 1,
    )


def normalize_caption(reply: str) -> str:
    """First non-empty line of a completion, minus one layer of quotes."""
    for line in reply.splitlines():
        line = line.strip()
        if line:
            if len(line) >= 2 and line[0] == line[-1] and line[0] in "\"'":
                line = line[1:-1].strip()
            return line
    return ""


@dataclass(frozen=True)
class CaptionResult:
    clip_id: str
    variant: str
    caption: str
    word_count: int
    flags: CaptionFlags

    @classmethod
    def from_caption(cls, clip_id: str, variant: str, caption: str) -> "CaptionResult":
        return cls(clip_id, variant, caption, word_count(caption), validate_caption(caption))

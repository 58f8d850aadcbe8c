"""Single shared word-tokenization rule for captions.

Every word count in the package (caption validation, dataset statistics)
goes through :func:`words` so the two can never disagree: a word is a
maximal run of non-whitespace characters, punctuation attached.
"""

from __future__ import annotations


def words(text: str) -> list[str]:
    """Split on runs of whitespace, dropping empty tokens."""
    return text.split()


def word_count(text: str) -> int:
    return len(text.split())

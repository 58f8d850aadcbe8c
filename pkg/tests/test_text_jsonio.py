"""Shared tokenizer rule and JSONL IO."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from moodcap.jsonio import JsonlError, dump_jsonl, load_jsonl
from moodcap.text import word_count, words


class TestWordCount:
    def test_runs_of_whitespace_collapse(self):
        assert word_count("a  b\t c\nd") == 4

    def test_leading_trailing_whitespace_ignored(self):
        assert word_count("  hello world  ") == 2

    def test_punctuation_stays_attached(self):
        assert word_count("Thunder rumbles, loudly.") == 3

    def test_empty_and_blank(self):
        assert word_count("") == 0
        assert word_count("   ") == 0

    @given(st.lists(st.text(alphabet=st.characters(blacklist_categories=("Zs", "Cc")),
                            min_size=1), min_size=0, max_size=20))
    def test_count_matches_token_list(self, tokens):
        text = " ".join(tokens)
        assert word_count(text) == len(words(text))


class TestJsonl:
    def test_round_trip(self, tmp_path):
        rows = [{"clip_id": "a", "x": 1.5}, {"clip_id": "b", "s": "naïve ☂"}]
        path = tmp_path / "rows.jsonl"
        dump_jsonl(rows, path)
        assert list(load_jsonl(path)) == rows

    def test_empty_round_trip(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        dump_jsonl([], path)
        assert path.read_text() == ""
        assert list(load_jsonl(path)) == []

    def test_one_object_per_line(self, tmp_path):
        path = tmp_path / "rows.jsonl"
        dump_jsonl([{"a": 1}, {"b": 2}], path)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert json.loads(lines[0]) == {"a": 1}

    def test_invalid_json_names_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"ok": 1}\n{broken\n', encoding="utf-8")
        with pytest.raises(JsonlError, match=":2:"):
            list(load_jsonl(path))

    def test_non_object_line_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text("[1, 2]\n", encoding="utf-8")
        with pytest.raises(JsonlError, match=":1:"):
            list(load_jsonl(path))

    def test_blank_line_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"a": 1}\n\n{"b": 2}\n', encoding="utf-8")
        with pytest.raises(JsonlError, match=":2:"):
            list(load_jsonl(path))

    def test_write_leaves_no_temp_files(self, tmp_path):
        path = tmp_path / "rows.jsonl"
        dump_jsonl([{"a": 1}], path)
        assert [p.name for p in tmp_path.iterdir()] == ["rows.jsonl"]

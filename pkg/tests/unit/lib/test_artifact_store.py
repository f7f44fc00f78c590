"""Tests for atomic artifact output."""

import json

import pandas as pd
import pytest

from src.lib.artifact_store import ArtifactStore, config_digest, experiment_dir


class TestArtifactStore:
    """Test ArtifactStore writes."""

    @pytest.fixture
    def store(self, tmp_path):
        """Create a store rooted in a temp directory."""
        return ArtifactStore(tmp_path / "artifacts")

    def test_write_json_round_trips(self, store):
        """Test JSON is written with indent and trailing newline and reads back."""
        path = store.write_json("a/b/result.json", {"z": 1, "a": [1, 2]})

        text = path.read_text(encoding="utf-8")
        assert text.endswith("}\n")
        assert list(json.loads(text)) == ["z", "a"]
        assert json.loads(text) == {"z": 1, "a": [1, 2]}

    def test_write_csv_has_no_index(self, store):
        """Test CSVs carry only the frame's columns with LF line endings."""
        path = store.write_csv("table.csv", pd.DataFrame({"x": [1, 2], "y": ["a", "b"]}))

        assert path.read_bytes() == b"x,y\n1,a\n2,b\n"

    def test_identical_writes_are_byte_identical(self, store):
        """Test writing the same payload twice gives the same bytes."""
        first = store.write_json("r.json", {"k": 0.1}).read_bytes()
        second = store.write_json("r.json", {"k": 0.1}).read_bytes()
        assert first == second

    def test_no_temp_files_left(self, store):
        """Test the temp file is renamed away after a successful write."""
        store.write_json("notes.json", {"note": "hello"})
        assert [p.name for p in store.root.iterdir()] == ["notes.json"]

    def test_failed_replace_cleans_up(self, store, mocker):
        """Test a failed rename leaves neither the target nor a temp file."""
        mocker.patch("src.lib.artifact_store.os.replace", side_effect=OSError("disk full"))

        with pytest.raises(OSError):
            store.write_json("notes.json", {"note": "hello"})

        assert list(store.root.iterdir()) == []


class TestHelpers:
    """Test digest and directory helpers."""

    def test_digest_ignores_key_order(self):
        """Test logically equal payloads share a digest."""
        assert config_digest({"a": 1, "b": [1, 2]}) == config_digest({"b": [1, 2], "a": 1})

    def test_digest_changes_with_content(self):
        """Test different payloads get different digests."""
        assert config_digest({"seed": 0}) != config_digest({"seed": 1})
        assert len(config_digest({"seed": 0})) == 12

    def test_experiment_dir_layout(self, tmp_path):
        """Test sweep points land under profile/B<b>/seed<s>."""
        assert experiment_dir(tmp_path, "react", 16, 3) == tmp_path / "react" / "B16" / "seed3"

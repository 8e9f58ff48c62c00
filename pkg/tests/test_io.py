"""Tests for dicke_sim.io."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from dicke_sim.analysis import SimulationResult
from dicke_sim.errors import ConfigError
from dicke_sim.io import (
    CSV_COLUMNS,
    parse_config_text,
    read_config,
    serialize_config,
    write_config,
    write_csv,
    write_json,
)
from dicke_sim.models import RunConfig
from dicke_sim.presets import preset, preset_values


class TestConfigText:
    """Tests for parse_config_text."""

    def test_comments_and_blanks(self) -> None:
        """Comments and empty lines are skipped."""
        values = parse_config_text("# header\n\nn_centers = 3  # three\nmodel=a\n")
        assert values == {"n_centers": "3", "model": "a"}

    def test_unknown_key(self) -> None:
        """Keys outside RunConfig are rejected."""
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config_text("n = 3\n")

    def test_duplicate_key(self) -> None:
        """A key may appear once."""
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("samples = 3\nsamples = 4\n")

    def test_malformed_line(self) -> None:
        """Lines need an '='."""
        with pytest.raises(ConfigError, match=":1:"):
            parse_config_text("samples 3\n")

    def test_missing_file(self, tmp_path: Path) -> None:
        """An unreadable file is a config error."""
        with pytest.raises(ConfigError):
            read_config(tmp_path / "absent.conf")

    def test_fixture_file(self, tmp_config_file: Path) -> None:
        """A full file validates into a RunConfig."""
        config = RunConfig(**read_config(tmp_config_file))
        assert config.n_centers == 2
        assert config.t_max_ns == 10.0
        assert config.samples == 21


class TestSerializeConfig:
    """Tests for serialize_config and write_config."""

    def test_round_trip(self) -> None:
        """Serialized configs parse back to the same values."""
        config = RunConfig(**preset_values("n10"), svg=True, rel_tol=3e-10)
        again = RunConfig(**parse_config_text(serialize_config(config)))
        assert again == config

    def test_field_order(self) -> None:
        """Keys are written in field order."""
        text = serialize_config(preset("n2"))
        keys = [line.split(" = ")[0] for line in text.splitlines()]
        assert keys == list(RunConfig.model_fields)

    def test_write(self, tmp_path: Path) -> None:
        """Parent directories are created."""
        path = tmp_path / "a" / "run.conf"
        write_config(preset("n2"), path)
        assert RunConfig(**read_config(path)) == preset("n2")


class TestWriteCsv:
    """Tests for write_csv."""

    def test_both_models(self, small_results: list[SimulationResult], tmp_path: Path) -> None:
        """Header, one row per sample, LF endings."""
        path = tmp_path / "f.csv"
        write_csv(small_results, path)
        raw = path.read_bytes()
        assert b"\r\n" not in raw
        rows = list(csv.reader(raw.decode("utf-8").splitlines()))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert len(rows) == 1 + 11
        assert float(rows[1][0]) == 0.0
        assert all(cell != "" for cell in rows[1])
        a_norm = [float(row[1]) for row in rows[1:]]
        assert max(a_norm) == 1.0

    def test_single_model(self, small_results: list[SimulationResult], tmp_path: Path) -> None:
        """Columns of a model that was not run stay empty."""
        path = tmp_path / "f.csv"
        write_csv(small_results[:1], path)
        rows = list(csv.reader(path.read_text(encoding="utf-8").splitlines()))
        for row in rows[1:]:
            assert row[2] == row[4] == row[5] == row[6] == ""
            assert row[1] != ""

    def test_full_precision(self, small_results: list[SimulationResult], tmp_path: Path) -> None:
        """Values parse back to the exact floats."""
        path = tmp_path / "f.csv"
        write_csv(small_results, path)
        rows = list(csv.reader(path.read_text(encoding="utf-8").splitlines()))
        reference = small_results[1]
        assert [float(row[4]) for row in rows[1:]] == reference.f_raw.tolist()

    def test_empty(self, tmp_path: Path) -> None:
        """Nothing to write is an error."""
        with pytest.raises(ValueError):
            write_csv([], tmp_path / "f.csv")


class TestWriteJson:
    """Tests for write_json."""

    def test_roundtrip(self, tmp_path: Path) -> None:
        """Data survives a write/read cycle with a trailing newline."""
        path = tmp_path / "sub" / "report.json"
        write_json({"σ": [0, 1], "value": 1.5}, path)
        text = path.read_text(encoding="utf-8")
        assert text.endswith("\n")
        assert json.loads(text) == {"σ": [0, 1], "value": 1.5}

"""Tests for dicke_sim.cli."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from dicke_sim import cli
from dicke_sim.cli import app
from dicke_sim.dicke_space import PopulationState, StateSpace, initial_state
from dicke_sim.models import Sigma

runner = CliRunner()

SHORT = ["--t-max", "10", "--samples", "21"]


class TestSimulateCommand:
    """Tests for the 'simulate' CLI command."""

    def test_writes_outputs(self, tmp_path: Path) -> None:
        """CSV, report, config echo and SVG land in the output directory."""
        out = tmp_path / "run"
        result = runner.invoke(app, ["simulate", "--preset", "n2", *SHORT, "-o", str(out), "--svg"])
        assert result.exit_code == 0, result.output
        for name in ("fluorescence.csv", "report.json", "run.conf", "fluorescence.svg"):
            assert (out / name).exists()
        report = json.loads((out / "report.json").read_text())
        assert [m["label"] for m in report["models"]] == ["A", "B"]
        assert report["config"]["n_centers"] == 2
        assert report["tool_version"]
        assert (out / "fluorescence.svg").read_text().startswith("<?xml")

    def test_no_svg_by_default(self, tmp_path: Path) -> None:
        """The plot is opt-in."""
        result = runner.invoke(app, ["simulate", "--preset", "n2", *SHORT, "-o", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert not (tmp_path / "fluorescence.svg").exists()

    def test_deterministic(self, tmp_path: Path) -> None:
        """Two runs with one config write byte-identical CSVs."""
        outputs = []
        for name in ("first", "second"):
            out = tmp_path / name
            result = runner.invoke(app, ["simulate", "--preset", "n2", *SHORT, "-o", str(out)])
            assert result.exit_code == 0, result.output
            outputs.append((out / "fluorescence.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_single_model(self, tmp_path: Path) -> None:
        """--model b reports only Model B."""
        result = runner.invoke(
            app, ["simulate", "--preset", "n2", "--model", "b", *SHORT, "-o", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        report = json.loads((tmp_path / "report.json").read_text())
        assert [m["label"] for m in report["models"]] == ["B"]

    def test_config_file(self, tmp_config_file: Path, tmp_path: Path) -> None:
        """A config file supplies the full parameter set."""
        out = tmp_path / "cfg"
        result = runner.invoke(app, ["simulate", "--config", str(tmp_config_file), "-o", str(out)])
        assert result.exit_code == 0, result.output
        lines = (out / "fluorescence.csv").read_text().splitlines()
        assert len(lines) == 1 + 21

    def test_flags_override_config(self, tmp_config_file: Path, tmp_path: Path) -> None:
        """Command-line values win over the config file."""
        result = runner.invoke(
            app,
            ["simulate", "--config", str(tmp_config_file), "--samples", "5", "-o", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        echo = (tmp_path / "run.conf").read_text()
        assert "samples = 5\n" in echo

    def test_bad_model(self, tmp_path: Path) -> None:
        """An unknown model is a config error."""
        result = runner.invoke(app, ["simulate", "--model", "z", "-o", str(tmp_path)])
        assert result.exit_code == 3

    def test_bad_preset(self, tmp_path: Path) -> None:
        """An unknown preset is a config error."""
        result = runner.invoke(app, ["simulate", "--preset", "bogus", "-o", str(tmp_path)])
        assert result.exit_code == 3

    def test_unknown_config_key(self, tmp_path: Path) -> None:
        """Config files may only use known keys."""
        path = tmp_path / "bad.conf"
        path.write_text("n_centres = 3\n", encoding="utf-8")
        result = runner.invoke(app, ["simulate", "--config", str(path)])
        assert result.exit_code == 3

    def test_oversized(self, tmp_path: Path) -> None:
        """N above the supported range is a config error."""
        result = runner.invoke(
            app, ["simulate", "--preset", "n2", "--n", "65", *SHORT, "-o", str(tmp_path)]
        )
        assert result.exit_code == 3


class TestAsymptoteCommand:
    """Tests for the 'asymptote' CLI command."""

    def test_n2(self) -> None:
        """Both routes are printed for N=2."""
        result = runner.invoke(app, ["asymptote", "--preset", "n2"])
        assert result.exit_code == 0, result.output

    def test_manifolds_start_in_their_own_sigma(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Each row starts from the σ it is labelled with, once per model."""
        seen: list[int] = []

        def recording(space: StateSpace, sigma: Sigma) -> PopulationState:
            seen.append(sigma)
            return initial_state(space, sigma)

        monkeypatch.setattr(cli, "initial_state", recording)
        result = runner.invoke(app, ["asymptote", "--preset", "n2", "--model", "both"])
        assert result.exit_code == 0, result.output
        assert seen == [0, 1, 0, 1]


class TestAblateCommand:
    """Tests for the 'ablate' CLI command."""

    def test_writes_report(self, tmp_path: Path) -> None:
        """One row per term in ablation.json."""
        result = runner.invoke(app, ["ablate", "--preset", "n2", *SHORT, "-o", str(tmp_path)])
        assert result.exit_code == 0, result.output
        report = json.loads((tmp_path / "ablation.json").read_text())
        assert len(report["rows"]) == 9
        assert report["n_centers"] == 2


class TestOracleVerifyCommand:
    """Tests for the 'oracle-verify' CLI command."""

    def test_passes(self) -> None:
        """All identities hold for small n."""
        result = runner.invoke(app, ["oracle-verify", "--max-n", "5"])
        assert result.exit_code == 0, result.output

    def test_range(self) -> None:
        """--max-n is capped by the enumeration limit."""
        result = runner.invoke(app, ["oracle-verify", "--max-n", "40"])
        assert result.exit_code != 0


class TestPresetsCommand:
    """Tests for the 'presets' CLI command."""

    def test_lists(self) -> None:
        """The command exits cleanly."""
        result = runner.invoke(app, ["presets"])
        assert result.exit_code == 0, result.output

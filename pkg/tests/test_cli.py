"""Tests for the command-line interface."""

import json

import click
import pytest
from click.testing import CliRunner

from coev_grid import __version__
from coev_grid.cli import main, parse_address
from coev_grid.config import dump_config


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def config_file(tmp_path, small_config):
    """Small configuration written to disk."""
    path = tmp_path / "experiment.toml"
    path.write_text(dump_config(small_config), encoding="utf-8")
    return path


class TestCli:
    """Tests for the coev-grid command group."""

    def test_version(self, runner):
        """Test --version."""
        result = runner.invoke(main, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_local_run(self, runner, config_file, tmp_path):
        """Test a short local run writing its artifacts."""
        out = tmp_path / "out"
        result = runner.invoke(
            main,
            ["local", "--config", str(config_file), "--output-dir", str(out), "--iterations", "2"],
        )
        assert result.exit_code == 0, result.output
        report = json.loads((out / "report.json").read_text())
        assert len(report["ranking"]) == 4
        assert (out / "heatmap.json").exists()

    def test_invalid_config(self, runner, tmp_path):
        """Test that a bad configuration is reported, not raised."""
        path = tmp_path / "bad.toml"
        path.write_text("[coev]\nmutation_probability = 2.0\n", encoding="utf-8")
        result = runner.invoke(main, ["local", "--config", str(path)])
        assert result.exit_code == 1
        assert "coev.mutation_probability" in result.output

    def test_master_rejects_bad_address(self, runner, config_file):
        """Test that client addresses must be host:port."""
        result = runner.invoke(main, ["master", "--config", str(config_file), "--clients", "nohost"])
        assert result.exit_code == 2


class TestParseAddress:
    """Tests for parse_address."""

    def test_host_port(self):
        """Test a valid address."""
        assert parse_address("127.0.0.1:5000") == ("127.0.0.1", 5000)

    @pytest.mark.parametrize("text", ["localhost", ":5000", "host:port"])
    def test_invalid(self, text):
        """Test malformed addresses."""
        with pytest.raises(click.BadParameter):
            parse_address(text)

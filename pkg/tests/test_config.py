"""Tests for experiment configuration and seeding."""

from pathlib import Path

import numpy as np
import pytest

from coev_grid.config import (
    ExperimentConfig,
    StreamKind,
    build_config,
    dump_config,
    load_config,
    parse_config,
    seed_hierarchy,
)
from coev_grid.errors import ConfigError
from coev_grid.grid.topology import CellId
from coev_grid.nn.optim import OptimizerKind

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


class TestParseConfig:
    """Tests for parsing and validation."""

    def test_empty_document_gives_defaults(self):
        """Test that every key has a default."""
        config = parse_config("")
        assert config.grid.rows == 2
        assert config.coev.tournament_size == 2
        assert config.training.initial_learning_rate == 0.0002
        assert config.optimizer_kind is OptimizerKind.ADAM
        assert config.to_distribution().n_modes == 8

    def test_out_of_range_names_key(self):
        """Test that a bad probability is reported with its dotted key."""
        with pytest.raises(ConfigError) as exc:
            parse_config("[coev]\nmutation_probability = 1.5\n")
        assert exc.value.key == "coev.mutation_probability"

    def test_unknown_key_rejected(self):
        """Test that unknown keys are refused."""
        with pytest.raises(ConfigError) as exc:
            parse_config("[grid]\nrows = 3\nlayers = 2\n")
        assert exc.value.key == "grid.layers"

    def test_invalid_toml(self):
        """Test that malformed TOML raises ConfigError."""
        with pytest.raises(ConfigError):
            parse_config("[grid\nrows = 3")

    def test_neighborhood_size(self):
        """Test that only sizes 1 and 5 are accepted."""
        with pytest.raises(ConfigError):
            build_config({"grid": {"neighborhood_size": 9}})

    def test_tournament_larger_than_neighborhood(self):
        """Test that a 1x1 grid cannot host a tournament of two."""
        with pytest.raises(ConfigError):
            build_config({"grid": {"rows": 1, "cols": 1}})
        config = build_config({"grid": {"rows": 1, "cols": 1}, "coev": {"tournament_size": 1}})
        assert config.grid_spec.size == 1

    def test_generator_activation_checked(self):
        """Test that the generator must end in tanh."""
        with pytest.raises(ConfigError):
            build_config({
                "network": {
                    "generator": {"input_dim": 4, "output_dim": 2, "output_activation": "sigmoid"}
                }
            })

    @pytest.mark.parametrize(
        "kind, n_modes",
        [("gaussian_ring", 1), ("gaussian_grid", 8), ("gaussian_grid", 2)],
    )
    def test_mode_count_fits_kind(self, kind, n_modes):
        """Test that the mode count is checked against the dataset kind."""
        with pytest.raises(ConfigError) as exc:
            parse_config(f"[dataset]\nkind = '{kind}'\nn_modes = {n_modes}\n")
        assert exc.value.key == "dataset.n_modes"

    @pytest.mark.parametrize(
        "kind, n_modes",
        [("gaussian_ring", 2), ("gaussian_grid", 1), ("gaussian_grid", 25), ("single_gaussian", 1)],
    )
    def test_mode_count_accepted(self, kind, n_modes):
        """Test mode counts every dataset kind can build."""
        config = build_config({"dataset": {"kind": kind, "n_modes": n_modes}})
        assert config.to_distribution().n_modes == (1 if kind == "single_gaussian" else n_modes)

    def test_round_trip(self, small_config):
        """Test dump followed by parse."""
        assert parse_config(dump_config(small_config)) == small_config

    def test_with_overrides(self, small_config):
        """Test per-section overrides keep other keys."""
        changed = small_config.with_overrides(grid={"rows": 3})
        assert changed.grid.rows == 3
        assert changed.grid.cols == small_config.grid.cols
        assert changed.run == small_config.run

    def test_frozen(self, small_config):
        """Test that configurations are immutable."""
        with pytest.raises(Exception):
            small_config.run.iterations = 5


class TestShippedConfigs:
    """Tests for the bundled configuration files."""

    @pytest.mark.parametrize("name", ["default.toml", "celeba_style.toml"])
    def test_parses(self, name):
        """Test that each bundled file validates."""
        config = load_config(CONFIG_DIR / name)
        assert isinstance(config, ExperimentConfig)

    def test_default_matches_builtin(self):
        """Test that default.toml spells out the built-in defaults."""
        config = load_config(CONFIG_DIR / "default.toml")
        assert config.with_overrides(run={"name": "coev-grid"}) == ExperimentConfig()

    def test_missing_file(self, tmp_path):
        """Test that an unreadable path raises ConfigError."""
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.toml")

    def test_none_gives_defaults(self):
        """Test load_config(None)."""
        assert load_config(None) == ExperimentConfig()


class TestSeedHierarchy:
    """Tests for per-cell random streams."""

    def test_deterministic(self):
        """Test that equal inputs give equal streams."""
        a = seed_hierarchy(3, CellId(1, 2), StreamKind.TRAINING).random(5)
        b = seed_hierarchy(3, CellId(1, 2), StreamKind.TRAINING).random(5)
        assert np.array_equal(a, b)

    def test_streams_differ(self):
        """Test that cells, purposes and master seeds separate streams."""
        base = seed_hierarchy(3, CellId(0, 0), StreamKind.DATA).random(5)
        for other in (
            seed_hierarchy(3, CellId(0, 1), StreamKind.DATA),
            seed_hierarchy(3, CellId(0, 0), StreamKind.MIXTURE),
            seed_hierarchy(4, CellId(0, 0), StreamKind.DATA),
        ):
            assert not np.array_equal(base, other.random(5))

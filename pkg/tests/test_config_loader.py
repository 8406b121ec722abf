"""Tests for run-config loading and validation"""

from pathlib import Path

import pytest

from src.errors import ConfigError
from src.models.config import EnvName, NormalizationMode, RunConfig
from src.models.settings import RuntimeSettings, apply_thread_cap
from src.validation import config_from_dict, dump_run_config, index_lines, load_run_config, parse_run_config

PRESETS = sorted((Path(__file__).resolve().parent.parent / "config").glob("*.yaml"))

VALID = """\
seed: 3
env:
  name: PointReach
  horizon: 20
encoder:
  embed_dim: 12
  num_heads: 2
agent:
  batch_size: 8
"""


class TestParseRunConfig:
    def test_valid(self):
        config = parse_run_config(VALID)
        assert config.seed == 3
        assert config.env.horizon == 20
        assert config.encoder.embed_dim == 12
        assert config.env.pipeline.normalization.mode == NormalizationMode.STATIC

    def test_defaults_for_empty_document(self):
        assert parse_run_config("") == RunConfig()

    def test_unknown_key_names_its_line(self):
        text = VALID.replace("  horizon: 20\n", "  horizon: 20\n  horizn: 5\n")
        with pytest.raises(ConfigError) as info:
            parse_run_config(text, source="run.yaml")
        assert info.value.line == 5
        assert info.value.key_path == "env.horizn"
        assert str(info.value).startswith("run.yaml:5: env.horizn:")

    def test_out_of_range_value(self):
        text = VALID.replace("batch_size: 8", "batch_size: 0")
        with pytest.raises(ConfigError) as info:
            parse_run_config(text)
        assert info.value.line == 9
        assert info.value.key_path == "agent.batch_size"

    def test_width_not_divisible_by_six(self):
        with pytest.raises(ConfigError) as info:
            parse_run_config(VALID.replace("embed_dim: 12", "embed_dim: 16"))
        assert info.value.line == 5
        assert "divisible by 6" in str(info.value)

    def test_color_mismatch(self):
        with pytest.raises(ConfigError, match="colors"):
            parse_run_config(VALID.replace("name: PointReach", "name: ColorTouch"))

    def test_invalid_yaml(self):
        with pytest.raises(ConfigError) as info:
            parse_run_config("seed: [1, 2\nenv: {}\n")
        assert info.value.line is not None

    def test_top_level_must_be_mapping(self):
        with pytest.raises(ConfigError):
            parse_run_config("- 1\n- 2\n")

    def test_dump_round_trip(self):
        config = parse_run_config(VALID)
        assert parse_run_config(dump_run_config(config)) == config

    def test_from_dict(self):
        config = config_from_dict({"env": {"name": "ColorTouch"}, "encoder": {"color": True}})
        assert config.env.name == EnvName.COLOR_TOUCH


class TestPresets:
    @pytest.mark.parametrize("path", PRESETS, ids=lambda p: p.name)
    def test_preset_loads(self, path):
        config = load_run_config(path)
        assert config.encoder.color == config.env.emits_color

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "missing.yaml")


def test_index_lines():
    lines = index_lines("a: 1\nb:\n  c: 2\n  d:\n    - 5\n")
    assert lines[("a",)] == 1
    assert lines[("b", "c")] == 3
    assert lines[("b", "d", 0)] == 5


def test_runtime_settings_from_environment(monkeypatch):
    monkeypatch.setenv("PPRL_LOG_LEVEL", "DEBUG")
    assert RuntimeSettings().log_level == "DEBUG"


def test_thread_cap_is_positive():
    assert apply_thread_cap(RuntimeSettings()) >= 1

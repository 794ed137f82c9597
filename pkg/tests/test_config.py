from pathlib import Path

import pytest

from downsample_gcn.errors import ConfigError
from downsample_gcn.harness.config import ExperimentConfig, format_config, load_config, parse_config

DEFAULT_CFG = Path(__file__).resolve().parents[1] / "configs" / "default.cfg"


def test_shipped_default_matches_builtin():
    assert load_config(DEFAULT_CFG) == ExperimentConfig()


def test_parse_values_and_comments():
    cfg = parse_config("""
        # comment
        N_list = 256, 512   # trailing comment
        n_list = 64,128
        trials = 3
        c_d = 12.5
        record_wall_time = yes
        activation = tanh
    """)
    assert cfg.N_list == [256, 512] and cfg.n_list == [64, 128]
    assert cfg.trials == 3 and cfg.c_d == 12.5 and cfg.record_wall_time and cfg.activation == "tanh"


def test_round_trip_through_echo():
    cfg = ExperimentConfig().replace(trials=4, c_d=3.0, d_list=[10.0, 5.0])
    assert parse_config(format_config(cfg)) == cfg


@pytest.mark.parametrize("text", [
    "bogus = 1",
    "trials = 1\ntrials = 2",
    "trials",
    "trials = many",
    "trials = 0",
    "normalizer = by_degree",
    "n_list = 128, 4096",
    "quad_points = 15",
    "record_wall_time = maybe",
])
def test_rejects_bad_config(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        load_config(tmp_path / "nope.cfg")

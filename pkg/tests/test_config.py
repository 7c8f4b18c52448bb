import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from qldpctoolkit.config import SEED_ENV_VAR, ExperimentConfig, default_v0, load_config


def test_defaults():
    config = ExperimentConfig()
    assert config.mode == "hgp"
    assert config.lift_ell == 8
    assert config.v0 == 8
    assert config.delta == 14 and config.gamma_inner == 4
    assert config.sides == ["Z", "X"]


def test_default_v0():
    assert default_v0(2) == 8
    assert default_v0(64) == 12
    assert default_v0(1024) == 20
    assert ExperimentConfig(mode="lp", ell=1024).v0 == 20
    assert ExperimentConfig(ell=1024, lift_ell=4).v0 == 8


def test_invalid_configs():
    with pytest.raises(ValidationError):
        ExperimentConfig(mode="lp", ell=12)
    with pytest.raises(ValidationError):
        ExperimentConfig(mode="lp", ell=8, lift_ell=4)
    with pytest.raises(ValidationError):
        ExperimentConfig(error_weights=[1, -2])
    with pytest.raises(ValidationError):
        ExperimentConfig(delta=4, gamma_inner=5)
    with pytest.raises(ValidationError):
        ExperimentConfig(sides=[])
    with pytest.raises(ValidationError):
        ExperimentConfig(mode="toric")


def test_sides_are_deduplicated():
    assert ExperimentConfig(sides=["X", "Z", "X"]).sides == ["X", "Z"]


def test_load_config_precedence(tmp_path, monkeypatch):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"ell": 16, "seed": 3, "trials": 7}))
    config = load_config(str(path), {"trials": 9, "seed": None})
    assert (config.ell, config.seed, config.trials) == (16, 3, 9)

    monkeypatch.setenv(SEED_ENV_VAR, "42")
    assert load_config(str(path), {"seed": 5}).seed == 42


def test_bad_seed_env(monkeypatch):
    monkeypatch.setenv(SEED_ENV_VAR, "many")
    with pytest.raises(ValueError):
        load_config()


@pytest.mark.parametrize("name", ["toric_l4.json", "hgp_tanner.json", "lp_tanner.json"])
def test_sample_configs_load(name):
    path = Path(__file__).resolve().parent.parent / "samples" / "configs" / name
    config = load_config(str(path))
    assert config.ell == 4
    assert config.tanner_ell in (2, 4)

import json

import pytest

from src.services import config_manager
from src.services.config_manager import ConfigManagerError


def test_load_toml_config(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text(
        'command = "window"\nkind = "mfEntropy"\ninput = "spins.csv"\noutput = "out.csv"\n'
        "[window]\nwidth = 300\nshift = 1\n[inversion]\nrplm_lambda = 0.01\n",
        encoding="utf8",
    )
    cfg = config_manager.load(p)
    assert cfg.command == "window"
    assert cfg.window is not None and cfg.window.width == 300
    assert cfg.inversion.rplm_lambda == 0.01


def test_save_and_load_json_roundtrip(tmp_path):
    cfg = config_manager.validate({"command": "fit", "input": "a.csv", "output": "m.json", "method": "tap"})
    p = tmp_path / "cfg.json"
    config_manager.save(cfg, p)
    assert config_manager.load(p) == cfg
    assert json.loads(p.read_text(encoding="utf8"))["method"] == "tap"


def test_merge_prefers_overrides_and_keeps_nested_file_values():
    merged = config_manager.merge(
        {"command": "fit", "seed": 1, "inversion": {"ridge": 0.1, "rplm_lambda": 0.5}},
        {"seed": None, "method": "nmf", "inversion": {"ridge": None, "rplm_lambda": 0.2}, "window": {"width": None}},
    )
    assert merged["seed"] == 1
    assert merged["method"] == "nmf"
    assert merged["inversion"] == {"ridge": 0.1, "rplm_lambda": 0.2}
    assert "window" not in merged


def test_validate_rejects_unknown_keys_and_bad_values():
    with pytest.raises(ConfigManagerError):
        config_manager.validate({"command": "fit", "colour": "blue"})
    with pytest.raises(ConfigManagerError):
        config_manager.validate({"command": "window", "window": {"width": 0, "shift": 1}})
    with pytest.raises(ConfigManagerError):
        config_manager.validate({"command": "plot"})


def test_missing_or_malformed_files(tmp_path):
    with pytest.raises(ConfigManagerError):
        config_manager.load_raw(tmp_path / "absent.toml")
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]", encoding="utf8")
    with pytest.raises(ConfigManagerError):
        config_manager.load_raw(bad)

import importlib

import pytest


@pytest.mark.parametrize(
    "module, names",
    [
        ("src.services.config_manager", ["load", "load_raw", "merge", "save", "validate", "ConfigManagerError"]),
        ("src.services.validation_engine", ["validate_run_config", "ValidationError"]),
        ("src.services.auto_register", ["auto_register_inverters", "discover_inverter_modules", "AutoRegisterError"]),
        (
            "src.services.data_io",
            ["read_prices", "read_spins", "write_spins", "read_model", "write_model", "write_series", "read_series"],
        ),
        ("src.services.run_metadata", ["run_metadata", "config_hash", "resolve_seed"]),
    ],
)
def test_service_modules_expose_their_api(module, names):
    mod = importlib.import_module(module)
    for name in names:
        assert hasattr(mod, name), f"{module} lacks {name}"


def test_run_metadata_is_stable_for_equal_configs():
    from src.models.run_config import RunConfig
    from src.services.run_metadata import config_hash, resolve_seed, run_metadata

    a = RunConfig(command="fit", input="x.csv", output="m.json")
    b = RunConfig(command="fit", input="x.csv", output="m.json")
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(RunConfig(command="fit", input="y.csv", output="m.json"))
    meta = run_metadata(a, seed=5)
    assert meta["tool"] == "maxent-market" and meta["seed"] == 5 and meta["command"] == "fit"
    assert resolve_seed(9) == 9
    assert 0 <= resolve_seed(None) < 2**64


def test_cli_exposes_main():
    cli = importlib.import_module("src.cli")
    assert callable(cli.main)
    parser = cli.build_parser()
    args = parser.parse_args(["fit", "--input", "a.csv", "--output", "b.json", "--method", "tap"])
    assert args.command == "fit" and args.method == "tap"

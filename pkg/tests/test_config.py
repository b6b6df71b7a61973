import pytest

from src.config import ConfigManager, config
from src.config.run_config import RunConfig, load_key_value_file
from src.errors import UsageError


def test_repository_defaults():
    defaults = config.pipeline_defaults
    assert defaults["restarts"] == 50
    assert defaults["k_max"] == 10
    run = config.run_config()
    assert run.seed is None
    assert run.group_keys == ("year", "nace", "cluster")
    assert config.report_decimals == 3
    assert config.plot_config["svg_hashsalt"] == "coda-ratios"


def test_key_value_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(
        "# tuned run\n"
        "restarts = 20\n"
        "\n"
        "covariates = nace, importer\n"
        "numeric_covariates = none\n"
        "k = none\n",
        encoding="utf-8",
    )
    values = load_key_value_file(path)
    assert values == {"restarts": "20", "covariates": ["nace", "importer"], "numeric_covariates": [], "k": None}
    run = RunConfig.from_sources(file_values=values)
    assert run.restarts == 20
    assert run.covariates == ("nace", "importer")
    assert run.numeric_covariates == ()


@pytest.mark.parametrize("body", ["colour = red\n", "restarts 20\n"])
def test_key_value_file_errors(tmp_path, body):
    path = tmp_path / "bad.conf"
    path.write_text(body, encoding="utf-8")
    with pytest.raises(UsageError):
        load_key_value_file(path)


def test_missing_key_value_file(tmp_path):
    with pytest.raises(UsageError):
        load_key_value_file(tmp_path / "absent.conf")


def test_layering_precedence(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("restarts = 20\nseed = 4\n", encoding="utf-8")
    manager = ConfigManager(config_dir=str(tmp_path))
    run = manager.run_config(str(path), restarts=7, seed=None)
    assert run.restarts == 7
    assert run.seed == 4


def test_config_dir_without_yaml_uses_model_defaults(tmp_path):
    manager = ConfigManager(config_dir=str(tmp_path))
    assert manager.pipeline_defaults == {}
    assert manager.run_config().restarts == 50


@pytest.mark.parametrize("values", [
    {"k_min": 5, "k_max": 3},
    {"k_min": 1},
    {"dl_percentile": 100.0},
    {"delta_fraction": 0.0},
    {"seed": -1},
    {"imputation": "mean"},
    {"group_keys": ["country"]},
])
def test_invalid_values(values):
    with pytest.raises(UsageError):
        RunConfig.from_sources(overrides=values)


def test_require_seed_and_digest():
    with pytest.raises(UsageError, match="seed"):
        RunConfig().require_seed()
    a = RunConfig(seed=1)
    assert a.require_seed() == 1
    assert a.digest() == RunConfig(seed=1).digest()
    assert a.digest() != RunConfig(seed=2).digest()
    assert "seed: 1" in a.to_yaml()

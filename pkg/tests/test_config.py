import pytest

from vigil.config import RunConfig, load_config
from vigil.errors import ConfigurationError


def test_defaults_without_file():
    cfg = load_config(env={})
    assert cfg.window_s == 10.0
    assert cfg.classifier == "stub"
    assert cfg.sampling.clip_len == 8
    assert cfg.sampling.dynamic
    assert cfg.transform.target_side == 224
    assert cfg.api_port == 8000


def test_toml_round_trip(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        """
seed = 42
window_s = 5.0

[sampling]
clip_len = 4
stride = 8

[classifier]
kind = "remote"
endpoint = "http://model:9000"

[api]
port = 9001
token = "sekret"
"""
    )
    cfg = load_config(path, env={})
    assert cfg.seed == 42
    assert cfg.window_s == 5.0
    assert cfg.sampling.stride == 8
    assert cfg.classifier == "remote"
    assert cfg.endpoint == "http://model:9000"
    assert cfg.api_port == 9001
    assert cfg.api_token == "sekret"


def test_unknown_section_rejected(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("[nope]\nx = 1\n")
    with pytest.raises(ConfigurationError, match=r"unknown config section \[nope\]"):
        load_config(path, env={})


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("[api]\nprot = 8000\n")
    with pytest.raises(ConfigurationError, match="unknown config key api.prot"):
        load_config(path, env={})


def test_unknown_top_level_key_rejected(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("windows = 10\n")
    with pytest.raises(ConfigurationError, match="unknown config key windows"):
        load_config(path, env={})


def test_env_overrides(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("[api]\nport = 9001\n")
    cfg = load_config(
        path,
        env={"VIGIL_API_PORT": "9002", "VIGIL_SEED": "99", "VIGIL_CLASSIFIER_KIND": "stub"},
    )
    assert cfg.api_port == 9002
    assert cfg.seed == 99


def test_env_unknown_override_rejected():
    with pytest.raises(ConfigurationError, match="unknown environment override"):
        load_config(env={"VIGIL_API_PROT": "1"})


def test_env_bad_type_rejected():
    with pytest.raises(ConfigurationError, match="cannot parse"):
        load_config(env={"VIGIL_API_PORT": "not-a-port"})


def test_dynamic_stride_string(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('[sampling]\nstride = "dynamic"\n')
    cfg = load_config(path, env={})
    assert cfg.sampling.stride is None


def test_bad_stride_rejected(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('[sampling]\nstride = "sometimes"\n')
    with pytest.raises(ConfigurationError, match="stride"):
        load_config(path, env={})


def test_remote_requires_endpoint():
    with pytest.raises(ConfigurationError, match="endpoint"):
        RunConfig(classifier="remote")


def test_webhook_requires_url():
    with pytest.raises(ConfigurationError, match="webhook_url"):
        RunConfig(sink="webhook")


def test_missing_file_is_configuration_error():
    with pytest.raises(ConfigurationError, match="not found"):
        load_config("/nonexistent/run.toml", env={})


def test_bad_toml_reported(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("[broken\n")
    with pytest.raises(ConfigurationError, match="bad TOML"):
        load_config(path, env={})

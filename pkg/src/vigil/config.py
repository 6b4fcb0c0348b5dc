"""Run configuration: TOML file plus VIGIL_-prefixed environment overrides.

Unknown keys are rejected so typos fail loudly before anything runs. Env
overrides use VIGIL_<SECTION>_<KEY> (VIGIL_API_PORT=9000) or VIGIL_<KEY>
for top-level fields (VIGIL_SEED=3).
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigurationError
from .sampling import DYNAMIC, SamplingStrategy
from .transforms import DEFAULT_MEAN, DEFAULT_STD, TransformConfig

CLASSIFIER_KINDS = ("stub", "toy", "remote")
SINK_KINDS = ("log", "webhook")

# section -> key -> default; None marks a required-when-used string
_SCHEMA: dict[str, dict[str, Any]] = {
    "": {"seed": 7, "window_s": 10.0},
    "sampling": {"clip_len": 8, "stride": "dynamic", "num_clips": 1},
    "transform": {
        "resize_height": 256,
        "target_side": 224,
        "mean": list(DEFAULT_MEAN),
        "std": list(DEFAULT_STD),
    },
    "classifier": {
        "kind": "stub",
        "endpoint": "",
        "timeout_s": 5.0,
        "retries": 0,
        "toy_weights": "",
    },
    "storage": {"root": "./data/store"},
    "backend": {"db_path": "./data/vigil.db"},
    "notify": {"sink": "log", "webhook_url": "", "max_attempts": 3, "backoff_s": 1.0},
    "api": {"host": "127.0.0.1", "port": 8000, "token": ""},
}


@dataclass(frozen=True)
class RunConfig:
    seed: int = 7
    window_s: float = 10.0
    sampling: SamplingStrategy = field(
        default_factory=lambda: SamplingStrategy(clip_len=8, stride=None)
    )
    transform: TransformConfig = field(default_factory=TransformConfig.test)
    classifier: str = "stub"
    endpoint: str = ""
    timeout_s: float = 5.0
    retries: int = 0
    toy_weights: str = ""
    store_root: str = "./data/store"
    db_path: str = "./data/vigil.db"
    sink: str = "log"
    webhook_url: str = ""
    notify_max_attempts: int = 3
    notify_backoff_s: float = 1.0
    api_host: str = "127.0.0.1"
    api_port: int = 8000
    api_token: str = ""

    def __post_init__(self) -> None:
        if self.window_s <= 0:
            raise ConfigurationError(f"window_s must be positive, got {self.window_s}")
        if self.classifier not in CLASSIFIER_KINDS:
            raise ConfigurationError(
                f"classifier must be one of {CLASSIFIER_KINDS}, got {self.classifier!r}"
            )
        if self.classifier == "remote" and not self.endpoint:
            raise ConfigurationError("remote classifier needs an endpoint")
        if self.sink not in SINK_KINDS:
            raise ConfigurationError(f"sink must be one of {SINK_KINDS}, got {self.sink!r}")
        if self.sink == "webhook" and not self.webhook_url:
            raise ConfigurationError("webhook sink needs a webhook_url")
        if not 1 <= self.api_port <= 65535:
            raise ConfigurationError(f"api port out of range: {self.api_port}")


def _reject_unknown(raw: Mapping[str, Any]) -> None:
    for key, value in raw.items():
        if isinstance(value, dict):
            if key not in _SCHEMA:
                raise ConfigurationError(f"unknown config section [{key}]")
            for sub in value:
                if sub not in _SCHEMA[key]:
                    raise ConfigurationError(f"unknown config key {key}.{sub}")
        else:
            if key not in _SCHEMA[""]:
                raise ConfigurationError(f"unknown config key {key}")


def _coerce(name: str, value: str, default: Any) -> Any:
    try:
        if isinstance(default, bool):
            if value.lower() in ("1", "true", "yes"):
                return True
            if value.lower() in ("0", "false", "no"):
                return False
            raise ValueError(value)
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
        if isinstance(default, str):
            return value
    except ValueError:
        raise ConfigurationError(f"cannot parse {name}={value!r}") from None
    raise ConfigurationError(f"{name} cannot be overridden via environment")


def _apply_env(merged: dict[str, dict[str, Any]], env: Mapping[str, str]) -> None:
    for name, value in env.items():
        if not name.startswith("VIGIL_"):
            continue
        rest = name[len("VIGIL_"):].lower()
        # try top-level first (VIGIL_SEED), then section_key (VIGIL_API_PORT)
        if rest in _SCHEMA[""]:
            merged[""][rest] = _coerce(name, value, _SCHEMA[""][rest])
            continue
        section, _, key = rest.partition("_")
        if section in _SCHEMA and key in _SCHEMA[section]:
            merged[section][key] = _coerce(name, value, _SCHEMA[section][key])
        else:
            raise ConfigurationError(f"unknown environment override {name}")


def _parse_stride(value: Any) -> Optional[int]:
    if value == DYNAMIC:
        return None
    if isinstance(value, int) and not isinstance(value, bool) and value >= 1:
        return value
    raise ConfigurationError(f"sampling.stride must be 'dynamic' or a positive integer, got {value!r}")


def load_config(
    path: Optional[str | Path] = None, env: Optional[Mapping[str, str]] = None
) -> RunConfig:
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            raw = tomllib.loads(Path(path).read_text("utf-8"))
        except FileNotFoundError:
            raise ConfigurationError(f"config file not found: {path}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigurationError(f"bad TOML in {path}: {exc}") from exc
    _reject_unknown(raw)

    merged = {section: dict(defaults) for section, defaults in _SCHEMA.items()}
    for key, value in raw.items():
        if isinstance(value, dict):
            merged[key].update(value)
        else:
            merged[""][key] = value
    _apply_env(merged, env if env is not None else os.environ)

    sampling = SamplingStrategy(
        clip_len=int(merged["sampling"]["clip_len"]),
        stride=_parse_stride(merged["sampling"]["stride"]),
        num_clips=int(merged["sampling"]["num_clips"]),
        mode="test",
    )
    mean = merged["transform"]["mean"]
    std = merged["transform"]["std"]
    if len(mean) != 3 or len(std) != 3:
        raise ConfigurationError("transform.mean and transform.std need 3 values")
    try:
        transform = TransformConfig(
            resize_height=int(merged["transform"]["resize_height"]),
            target_side=int(merged["transform"]["target_side"]),
            mean=tuple(float(x) for x in mean),
            std=tuple(float(x) for x in std),
        )
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc

    return RunConfig(
        seed=int(merged[""]["seed"]),
        window_s=float(merged[""]["window_s"]),
        sampling=sampling,
        transform=transform,
        classifier=merged["classifier"]["kind"],
        endpoint=merged["classifier"]["endpoint"],
        timeout_s=float(merged["classifier"]["timeout_s"]),
        retries=int(merged["classifier"]["retries"]),
        toy_weights=merged["classifier"]["toy_weights"],
        store_root=merged["storage"]["root"],
        db_path=merged["backend"]["db_path"],
        sink=merged["notify"]["sink"],
        webhook_url=merged["notify"]["webhook_url"],
        notify_max_attempts=int(merged["notify"]["max_attempts"]),
        notify_backoff_s=float(merged["notify"]["backoff_s"]),
        api_host=merged["api"]["host"],
        api_port=int(merged["api"]["port"]),
        api_token=merged["api"]["token"],
    )

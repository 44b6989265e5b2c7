"""Run configuration, read from a YAML (or JSON) file.

Example::

    backend:
      url: http://localhost:8000/v1
      model_id: my-model
      parallelism: 4
      stream: false
      max_attempts: 3
      backoff_s: 1.0
      sampling: {temperature: 0}
    emission: {mode: measured, grid_intensity: 0.4, x_ref: 0.001719}
    weights: {alpha: 0.2, beta: 0.8, gamma: 0.5}
    strip_fences: true
    templates:
      toon: {format_rules: "..."}

The API key is taken from the environment variable named by
``backend.api_key_env`` (default ``TOONBENCH_API_KEY``), never from the file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import yaml

from ..scoring import ScoreWeights
from ..sustainability import EmissionConfig


class ConfigError(ValueError):
    pass


_BACKEND_KEYS = {
    "url", "model_id", "parallelism", "stream", "timeout_s",
    "max_attempts", "backoff_s", "sampling", "api_key_env",
}
_TOP_KEYS = {"backend", "emission", "weights", "strip_fences", "templates"}


@dataclass
class RunConfig:
    url: Optional[str] = None
    model_id: Optional[str] = None
    parallelism: int = 1
    stream: bool = False
    timeout_s: float = 120.0
    max_attempts: int = 3
    backoff_s: float = 1.0
    sampling: Dict[str, Any] = field(default_factory=lambda: {"temperature": 0.0})
    api_key_env: str = "TOONBENCH_API_KEY"
    emission: EmissionConfig = field(default_factory=EmissionConfig)
    weights: ScoreWeights = field(default_factory=ScoreWeights)
    strip_fences: bool = True
    templates: Dict[str, Dict[str, str]] = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "RunConfig":
        if not isinstance(data, Mapping):
            raise ConfigError("config must be a mapping")
        unknown = set(data) - _TOP_KEYS
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        backend = data.get("backend") or {}
        unknown = set(backend) - _BACKEND_KEYS
        if unknown:
            raise ConfigError(f"unknown backend key(s): {', '.join(sorted(unknown))}")
        try:
            cfg = cls(**backend)
            if "sampling" in backend:
                cfg.sampling = {"temperature": 0.0, **(backend["sampling"] or {})}
            if data.get("emission"):
                cfg.emission = EmissionConfig(**data["emission"])
            if data.get("weights"):
                cfg.weights = ScoreWeights(**data["weights"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        cfg.strip_fences = bool(data.get("strip_fences", True))
        cfg.templates = dict(data.get("templates") or {})
        if not isinstance(cfg.parallelism, int) or cfg.parallelism < 1:
            raise ConfigError("backend.parallelism must be a positive integer")
        return cfg


def load_config(path: Union[str, Path, None]) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return RunConfig.from_mapping(data or {})

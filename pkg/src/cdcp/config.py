"""Pipeline configuration: defaults, key=value files and overrides."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

CONFIG_ENV = "CDCP_CONFIG"

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class PipelineConfig:
    k: int = 8
    sigma2: float = 0.4
    patch_radius: int = 7
    light_fraction: float = 0.001
    boundary_clusters: int = 3
    seed: int = 0
    depth_inverted: bool = False

    def __post_init__(self):
        for name in ("k", "sigma2", "patch_radius", "light_fraction", "boundary_clusters"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")

    def with_overrides(self, **values) -> "PipelineConfig":
        return replace(self, **_coerce(values))

    def as_dict(self) -> dict:
        return asdict(self)


def _coerce(values: dict) -> dict:
    types = {f.name: f.type for f in fields(PipelineConfig)}
    out = {}
    for key, raw in values.items():
        key = key.strip().lower()
        if key not in types:
            raise KeyError(f"unknown config key {key!r}; expected one of {sorted(types)}")
        kind = types[key]
        if not isinstance(raw, str):
            out[key] = raw
        elif kind == "bool":
            word = raw.strip().lower()
            if word not in _TRUE | _FALSE:
                raise ValueError(f"{key}: expected a boolean, got {raw!r}")
            out[key] = word in _TRUE
        elif kind == "int":
            out[key] = int(raw)
        else:
            out[key] = float(raw)
    return out


def parse_config_text(text: str) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> PipelineConfig:
    """Defaults, then the config file (``path`` or $CDCP_CONFIG), then overrides."""
    config = PipelineConfig()
    path = path or os.environ.get(CONFIG_ENV)
    if path:
        config = config.with_overrides(**parse_config_text(Path(path).read_text()))
    if overrides:
        config = config.with_overrides(**overrides)
    return config


def dump_config(config: PipelineConfig) -> str:
    lines = []
    for key, value in config.as_dict().items():
        lines.append(f"{key}={str(value).lower() if isinstance(value, bool) else value}")
    return "\n".join(lines) + "\n"

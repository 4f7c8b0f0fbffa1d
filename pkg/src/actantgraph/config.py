"""Shared pipeline configuration with file/flag merging and hashing."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, fields
from pathlib import Path


@dataclass
class PipelineConfig:
    """Every stage hyperparameter with its stock default."""

    tuples: str | None = None
    embeddings: str | None = None
    ground_truth: str | None = None
    out_dir: str | None = None
    min_count: int = 50
    gamma: int = 3
    alpha_percentile: float = 75.0
    alpha_override: float | None = None
    beta: float = 2.0
    k_max: int = 8
    min_dispersion: float = 0.8
    sim_min: float = 0.8
    verified_min: int = 5
    unverified_min: int = 10
    seed: int = 0

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}

_INT_FIELDS = {"min_count", "gamma", "k_max", "verified_min", "unverified_min", "seed"}
_FLOAT_FIELDS = {"alpha_percentile", "alpha_override", "beta", "min_dispersion", "sim_min"}


def parse_config_file(path: str | Path) -> dict:
    """Flat ``key = value`` settings; '#' starts a comment; keys mirror flags."""
    values: dict = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ValueError(f"{path}:{line_no}: unknown setting {key!r}")
        if key in _INT_FIELDS:
            values[key] = int(value)
        elif key in _FLOAT_FIELDS:
            values[key] = float(value)
        else:
            values[key] = value
    return values


def merge_config(file_values: dict, flag_values: dict) -> PipelineConfig:
    """Start from defaults, apply the config file, let flags win."""
    config = PipelineConfig()
    for key, value in file_values.items():
        setattr(config, key, value)
    for key, value in flag_values.items():
        if value is not None:
            setattr(config, key, value)
    return config

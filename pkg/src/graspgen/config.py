"""Run configuration: YAML file plus command-line overrides.

Unknown keys are rejected so typos fail loudly; every command logs its
fully resolved configuration before running. The cache root may also come
from the GRASPGEN_CACHE environment variable.
"""

import os
from dataclasses import asdict, dataclass, fields

import yaml

from .errors import InvalidConfigError

CACHE_ENV = "GRASPGEN_CACHE"


@dataclass
class RunConfig:
    data: str = None              # raw CGD directory (convert) or input root
    cache: str = None             # preprocessed cache directory
    out: str = None               # output directory / file
    model: str = "ginnet"
    checkpoint: str = None
    vqvae_checkpoint: str = None
    calibration: str = None
    seed: int = 0
    epochs: int = 50
    batch_size: int = 8
    lr: float = 0.001
    test_fraction: float = 0.1
    label_fraction: float = 1.0
    multiplicity: int = 10
    iou_min: float = 0.25
    angle_max: float = 30.0
    out_size: int = 224
    scene_fraction: float = 1.0
    vqvae_epochs: int = 100
    workers: int = 0
    k: int = 1

    @classmethod
    def known_keys(cls):
        return {f.name for f in fields(cls)}

    @classmethod
    def from_file(cls, path):
        with open(path) as f:
            payload = yaml.safe_load(f) or {}
        if not isinstance(payload, dict):
            raise InvalidConfigError(f"{path}: config must be a mapping")
        return cls().merged(payload, source=str(path))

    def merged(self, overrides, source="overrides"):
        """New config with non-None overrides applied; unknown keys fail."""
        unknown = set(overrides) - self.known_keys()
        if unknown:
            raise InvalidConfigError(f"{source}: unknown config keys {sorted(unknown)}")
        merged = asdict(self)
        for key, value in overrides.items():
            if value is not None:
                merged[key] = value
        return RunConfig(**merged)

    def resolved(self):
        """Full key-value mapping, with the cache root falling back to the
        GRASPGEN_CACHE environment variable."""
        out = asdict(self)
        if out["cache"] is None:
            out["cache"] = os.environ.get(CACHE_ENV)
        return out


def load_run_config(config_path=None, **overrides):
    """Config from an optional file plus CLI overrides (None = unset)."""
    base = RunConfig.from_file(config_path) if config_path else RunConfig()
    return base.merged(overrides, source="command line")

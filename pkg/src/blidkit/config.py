"""Suite configuration: YAML loading, defaults, validation and provenance hash."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

__all__ = ["SUITES", "ConfigError", "SuiteConfig", "DEFAULTS", "load_config", "BLID_CHOICES"]

SUITES = ("verify-blid", "extend", "borel", "cohomology", "linearize-cutoff", "all")
BLID_CHOICES = ("pointwise", "taylor_integral", "radial", "scaled")

DEFAULTS: dict = {
    "suite": "all",
    "seed": 0,
    "grid_points": 1025,
    "k_max": 40,
    "bump": {"r_inner": 1.0 / 3.0, "r_outer": 0.5},
    "tolerances": {
        "local_identity": 1e-12,
        "agreement": 1e-10,
        "closed_form": 1e-8,
        "coefficient": 1e-12,
        "eigenvalue": 1e-6,
        "min_slope": 0.9,
        "growth": 1.1,
        "borel_margin": 0.1,
        "cutoff_agreement": 1e-12,
    },
    "samples": {
        "local_identity": 200,
        "bound": 1000,
        "containment": 500,
        "agreement": 200,
        "boundedness": 1000,
        "eigen_trials": 20,
        "linearize": 350,
    },
    "output_dir": "reports",
    "workers": 1,
    "extend": {"germ": "reciprocal", "blid": "pointwise"},
    "borel": {"jets": None},
    "cohomology": {"matrix": None, "jets": None, "order": 2},
    "linearize": {"map": "quadratic", "delta": 0.1, "alpha": 1.0, "epsilon": 0.5, "M": 2.0},
}

# keys that change where or how fast results are produced, not what they are
_NON_SEMANTIC = ("output_dir", "workers")


class ConfigError(ValueError):
    """Invalid configuration; ``path`` is the dotted key that failed."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _merge(base: dict, override: dict, prefix: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        path = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(path, f"unknown key (expected one of {sorted(base)})")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(path, "expected a mapping")
            out[key] = _merge(base[key], value, path + ".")
        else:
            out[key] = value
    return out


def _number(data: dict, path: str, *, integer: bool = False, positive: bool = False,
            minimum: float | None = None, optional: bool = False):
    node = data
    *parents, leaf = path.split(".")
    for p in parents:
        node = node[p]
    value = node[leaf]
    if value is None and optional:
        return
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(path, f"must be positive, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be at least {minimum}, got {value!r}")
    node[leaf] = int(value) if integer else float(value)


def validate(data: dict) -> dict:
    """Check types and ranges in place; raises :class:`ConfigError` naming the key path."""
    if data["suite"] not in SUITES:
        raise ConfigError("suite", f"unknown suite {data['suite']!r}; choose from {list(SUITES)}")
    _number(data, "seed", integer=True, minimum=0)
    _number(data, "grid_points", integer=True, minimum=3)
    _number(data, "k_max", integer=True, minimum=1)
    _number(data, "workers", integer=True, minimum=1)
    _number(data, "bump.r_inner", positive=True)
    _number(data, "bump.r_outer", positive=True)
    if not data["bump"]["r_inner"] < data["bump"]["r_outer"]:
        raise ConfigError("bump.r_inner", "must be smaller than bump.r_outer")
    for key in data["tolerances"]:
        _number(data, f"tolerances.{key}", positive=True)
    for key in data["samples"]:
        _number(data, f"samples.{key}", integer=True, minimum=1)
    if data["extend"]["blid"] not in BLID_CHOICES:
        raise ConfigError("extend.blid", f"choose from {list(BLID_CHOICES)}")
    if not isinstance(data["extend"]["germ"], str):
        raise ConfigError("extend.germ", "expected a catalog name")
    _number(data, "cohomology.order", integer=True, minimum=1)
    for key in ("delta", "epsilon", "M"):
        _number(data, f"linearize.{key}", positive=True)
    _number(data, "linearize.alpha", positive=True)
    if data["linearize"]["alpha"] > 1:
        raise ConfigError("linearize.alpha", "must lie in (0, 1]")
    if not isinstance(data["output_dir"], str):
        raise ConfigError("output_dir", "expected a path string")
    return data


@dataclass
class SuiteConfig:
    suite: str = "all"
    seed: int = 0
    grid_points: int = 1025
    k_max: int = 40
    bump: dict = field(default_factory=lambda: dict(DEFAULTS["bump"]))
    tolerances: dict = field(default_factory=lambda: dict(DEFAULTS["tolerances"]))
    samples: dict = field(default_factory=lambda: dict(DEFAULTS["samples"]))
    output_dir: str = "reports"
    workers: int = 1
    extend: dict = field(default_factory=lambda: dict(DEFAULTS["extend"]))
    borel: dict = field(default_factory=lambda: dict(DEFAULTS["borel"]))
    cohomology: dict = field(default_factory=lambda: dict(DEFAULTS["cohomology"]))
    linearize: dict = field(default_factory=lambda: dict(DEFAULTS["linearize"]))

    @classmethod
    def from_mapping(cls, raw: dict | None = None) -> "SuiteConfig":
        raw = {} if raw is None else raw
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "configuration must be a mapping")
        return cls(**validate(_merge(DEFAULTS, raw)))

    def to_mapping(self) -> dict:
        return {key: copy.deepcopy(getattr(self, key)) for key in DEFAULTS}

    def with_overrides(self, **overrides) -> "SuiteConfig":
        """Apply dotted-key overrides (``"linearize.delta": 0.2``), skipping ``None`` values."""
        data = self.to_mapping()
        for path, value in overrides.items():
            if value is None:
                continue
            node = data
            *parents, leaf = path.split(".")
            for p in parents:
                node = node[p]
            node[leaf] = value
        return SuiteConfig.from_mapping(data)

    def config_hash(self) -> str:
        """sha256 of the canonical JSON of every result-affecting key."""
        data = {k: v for k, v in self.to_mapping().items() if k not in _NON_SEMANTIC}
        text = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def load_config(path: str | Path | None) -> SuiteConfig:
    if path is None:
        return SuiteConfig.from_mapping({})
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"cannot parse {path}: {exc}") from None
    return SuiteConfig.from_mapping(raw or {})

"""Scenario configuration and its JSON representation.

Example::

    {
      "n_eaps": 2,
      "n_types": 5,
      "gamma": 2.2,
      "type_gen": {"a_range": [0.1, 1.0], "d_ms_range": [5, 10], "normalization": "unit", "seed": 7},
      "bandwidth_w": 1.0,
      "mc_draws": 10000,
      "seed": 0
    }

Exactly one of ``gamma``/``physical`` and one of ``type_gen``/``types`` must be
present.  Unknown keys are rejected at every level.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from .errors import ConfigError

SCHEMES = ("centralized", "contract", "stackelberg-complete", "stackelberg-asym")


@dataclass(frozen=True)
class PhysicalBlock:
    eta: float = 0.5
    noise_n0: float = 1e-8
    d_as_range: tuple = (15.0, 25.0)
    attenuation_db: float = 30.0
    path_loss_alpha: float = 2.0


@dataclass(frozen=True)
class TypeGen:
    a_range: tuple = (0.1, 1.0)
    d_ms_range: tuple = (5.0, 10.0)
    normalization: str = "unit"
    seed: Optional[int] = None
    attenuation_db: float = 30.0
    path_loss_alpha: float = 2.0


@dataclass(frozen=True)
class ScenarioConfig:
    n_eaps: int
    n_types: int
    gamma: Optional[float] = None
    physical: Optional[PhysicalBlock] = None
    type_gen: Optional[TypeGen] = None
    types: Optional[tuple] = None
    bandwidth_w: float = 1.0
    mc_draws: int = 10_000
    seed: int = 0
    exact: bool = True
    monotonicity: str = "enforce"
    replicates: int = 1

    def __post_init__(self):
        validate(self)

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, (PhysicalBlock, TypeGen)):
                v = {k: (list(x) if isinstance(x, tuple) else x) for k, x in asdict(v).items() if x is not None}
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out


def _range(name, r, positive=True):
    if not (isinstance(r, (list, tuple)) and len(r) == 2):
        raise ConfigError(f"{name} must be a [low, high] pair")
    lo, hi = float(r[0]), float(r[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi or (positive and lo <= 0):
        raise ConfigError(f"{name} must satisfy 0 < low <= high, got {r}")
    return (lo, hi)


def _int(name, v, minimum):
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"{name} must be an integer >= {minimum}, got {v!r}")


def validate(cfg: ScenarioConfig):
    _int("n_eaps", cfg.n_eaps, 1)
    _int("n_types", cfg.n_types, 1)
    _int("mc_draws", cfg.mc_draws, 1)
    _int("replicates", cfg.replicates, 1)
    _int("seed", cfg.seed, 0)
    if cfg.seed >= 2**64:
        raise ConfigError("seed must fit in 64 bits")
    if (cfg.gamma is None) == (cfg.physical is None):
        raise ConfigError("exactly one of 'gamma' and 'physical' is required")
    if cfg.gamma is not None and not (cfg.gamma > 0 and math.isfinite(cfg.gamma)):
        raise ConfigError("gamma must be positive")
    if (cfg.type_gen is None) == (cfg.types is None):
        raise ConfigError("exactly one of 'type_gen' and 'types' is required")
    if cfg.types is not None:
        if len(cfg.types) != cfg.n_types:
            raise ConfigError(f"'types' has {len(cfg.types)} entries but n_types is {cfg.n_types}")
        if any(not (t > 0) for t in cfg.types):
            raise ConfigError("types must be positive")
    if cfg.type_gen is not None:
        tg = cfg.type_gen
        _range("type_gen.a_range", tg.a_range)
        _range("type_gen.d_ms_range", tg.d_ms_range)
        if tg.normalization not in ("unit", "raw"):
            raise ConfigError("type_gen.normalization must be 'unit' or 'raw'")
        if tg.seed is not None:
            _int("type_gen.seed", tg.seed, 0)
    if cfg.physical is not None:
        ph = cfg.physical
        if not 0 < ph.eta < 1:
            raise ConfigError("physical.eta must lie in (0, 1)")
        if not ph.noise_n0 > 0:
            raise ConfigError("physical.noise_n0 must be positive")
        _range("physical.d_as_range", ph.d_as_range)
    if not cfg.bandwidth_w > 0:
        raise ConfigError("bandwidth_w must be positive")
    if cfg.monotonicity not in ("enforce", "verify"):
        raise ConfigError("monotonicity must be 'enforce' or 'verify'")
    if not isinstance(cfg.exact, bool):
        raise ConfigError("exact must be a boolean")


def _block(cls, name, raw):
    if not isinstance(raw, dict):
        raise ConfigError(f"'{name}' must be an object")
    known = {f.name for f in fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown keys in '{name}': {sorted(unknown)}")
    kwargs = {k: tuple(v) if isinstance(v, list) else v for k, v in raw.items()}
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def from_dict(raw: dict) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    known = {f.name for f in fields(ScenarioConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    data = dict(raw)
    if data.get("physical") is not None:
        data["physical"] = _block(PhysicalBlock, "physical", data["physical"])
    if data.get("type_gen") is not None:
        data["type_gen"] = _block(TypeGen, "type_gen", data["type_gen"])
    if data.get("types") is not None:
        if not isinstance(data["types"], list):
            raise ConfigError("'types' must be a list of numbers")
        data["types"] = tuple(float(t) for t in data["types"])
    for key in ("gamma", "bandwidth_w"):
        if isinstance(data.get(key), (int, float)) and not isinstance(data.get(key), bool):
            data[key] = float(data[key])
    try:
        return ScenarioConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ScenarioConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return from_dict(raw)


def dump_config(cfg: ScenarioConfig, path):
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2)
        fh.write("\n")

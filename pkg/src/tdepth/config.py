"""Resolved run configuration: GA, filter, expansion, merge policy and baseline window.

Sources are layered, later ones winning: built-in defaults, a JSON config
file, ``TDEPTH_*`` environment variables, then explicit overrides (CLI flags).
"""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .baselines import MAX_WINDOW
from .candidates import GreedyParams
from .circuit import MergePolicy, Order, Overlap
from .errors import ConfigError
from .expansion import ExpansionParams
from .ga import GaParams

ENV_PREFIX = "TDEPTH_"

# flat override name -> (section, field, parser)
_BOOL = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}


def _bool(v):
    if isinstance(v, bool):
        return v
    try:
        return _BOOL[str(v).strip().lower()]
    except KeyError:
        raise ValueError(f"not a boolean: {v!r}") from None


def _opt_int(v):
    if v is None or str(v).strip().lower() in ("", "none", "null"):
        return None
    return int(v)


FLAT_KEYS: dict[str, tuple[str, str, Any]] = {
    "seed": ("ga", "rng_seed", int),
    "population": ("ga", "population_size", int),
    "generations": ("ga", "generations", int),
    "elite": ("ga", "elite_k", int),
    "mutation": ("ga", "mutation_rate", float),
    "max_rounds": ("ga", "max_rounds", _opt_int),
    "workers": ("ga", "workers", int),
    "beta": ("greedy", "beta", float),
    "k_min": ("greedy", "k_min", int),
    "delta_max": ("greedy", "delta_max", float),
    "t_max": ("greedy", "t_max", _opt_int),
    "alpha": ("expansion", "alpha", float),
    "locality_k": ("expansion", "locality_k", int),
    "expand": ("expansion", "enabled", _bool),
    "every_round": ("expansion", "every_round", _bool),
    "policy": ("policy", "overlap", Overlap),
    "order": ("policy", "order", Order),
    "window": ("", "window", int),
}


@dataclass(frozen=True)
class Config:
    ga: GaParams = field(default_factory=GaParams)
    greedy: GreedyParams = field(default_factory=GreedyParams)
    expansion: ExpansionParams = field(default_factory=ExpansionParams)
    policy: MergePolicy = field(default_factory=MergePolicy)
    window: int = 6

    def __post_init__(self):
        if not 2 <= self.window <= MAX_WINDOW:
            raise ConfigError(f"window must be in 2..{MAX_WINDOW}, got {self.window}")

    def as_dict(self) -> dict:
        return {
            "ga": dataclasses.asdict(self.ga),
            "greedy": dataclasses.asdict(self.greedy),
            "expansion": dataclasses.asdict(self.expansion),
            "policy": {"overlap": self.policy.overlap.value, "order": self.policy.order.value},
            "window": self.window,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> Config:
        return Config().with_nested(data)

    def with_nested(self, data: Mapping) -> Config:
        """Apply a nested mapping shaped like :meth:`as_dict` (partial is fine)."""
        if not isinstance(data, Mapping):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - {"ga", "greedy", "expansion", "policy", "window"}
        if unknown:
            raise ConfigError(f"unknown config sections {sorted(unknown)}")
        flat = {}
        for section in ("ga", "greedy", "expansion", "policy"):
            sub = data.get(section, {})
            if not isinstance(sub, Mapping):
                raise ConfigError(f"config section {section!r} must be an object")
            for name, value in sub.items():
                key = next((k for k, (s, f, _) in FLAT_KEYS.items() if s == section and f == name), None)
                if key is None:
                    raise ConfigError(f"unknown config key {section}.{name}")
                flat[key] = value
        if "window" in data:
            flat["window"] = data["window"]
        return self.with_overrides(flat)

    def with_overrides(self, overrides: Mapping[str, Any]) -> Config:
        """Apply flat overrides such as ``{"seed": 3, "policy": "disjoint"}``; ``None`` values are skipped."""
        sections: dict[str, dict] = {"ga": {}, "greedy": {}, "expansion": {}, "policy": {}, "": {}}
        for key, raw in overrides.items():
            if key not in FLAT_KEYS:
                raise ConfigError(f"unknown setting {key!r}")
            section, name, parse = FLAT_KEYS[key]
            if raw is None and parse is not _opt_int:
                continue
            try:
                sections[section][name] = parse(raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None
        try:
            return Config(
                ga=dataclasses.replace(self.ga, **sections["ga"]),
                greedy=dataclasses.replace(self.greedy, **sections["greedy"]),
                expansion=dataclasses.replace(self.expansion, **sections["expansion"]),
                policy=dataclasses.replace(self.policy, **sections["policy"]),
                window=sections[""].get("window", self.window),
            )
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None


def env_overrides(environ: Mapping[str, str] | None = None) -> dict[str, str]:
    environ = os.environ if environ is None else environ
    out = {}
    for name, value in environ.items():
        if name.startswith(ENV_PREFIX):
            key = name[len(ENV_PREFIX):].lower()
            if key in FLAT_KEYS:
                out[key] = value
    return out


def load_config(path: str | os.PathLike | None = None, overrides: Mapping[str, Any] | None = None,
                environ: Mapping[str, str] | None = None) -> Config:
    cfg = Config()
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        cfg = cfg.with_nested(data)
    cfg = cfg.with_overrides(env_overrides(environ))
    if overrides:
        cfg = cfg.with_overrides(overrides)
    return cfg

import json

import pytest

from tdepth.circuit import MergePolicy, Order, Overlap
from tdepth.config import Config, env_overrides, load_config
from tdepth.errors import ConfigError


def test_defaults():
    cfg = Config()
    assert cfg.expansion.alpha == 0.3 and cfg.greedy.beta == 0.8
    assert (cfg.ga.population_size, cfg.ga.generations, cfg.ga.elite_k, cfg.ga.mutation_rate) == (20, 20, 4, 0.2)
    assert cfg.policy == MergePolicy(Overlap.EQUAL_AXIS, Order.STRICT)
    assert cfg.window == 6


def test_dict_round_trip():
    cfg = Config().with_overrides({"seed": 9, "policy": "disjoint", "order": "paper", "t_max": 7, "window": 4})
    assert Config.from_dict(json.loads(json.dumps(cfg.as_dict()))) == cfg


def test_layering(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"ga": {"rng_seed": 1, "generations": 5}, "window": 3}))
    env = {"TDEPTH_SEED": "2", "TDEPTH_EXPAND": "off", "OTHER": "x", "TDEPTH_UNKNOWN": "1"}
    cfg = load_config(path, {"generations": 7}, env)
    assert cfg.ga.rng_seed == 2
    assert cfg.ga.generations == 7
    assert cfg.window == 3
    assert cfg.expansion.enabled is False
    assert env_overrides(env) == {"seed": "2", "expand": "off"}


def test_none_overrides_are_skipped():
    assert Config().with_overrides({"seed": None, "alpha": None}) == Config()
    assert Config().with_overrides({"t_max": "none"}).greedy.t_max is None


@pytest.mark.parametrize("overrides", [
    {"window": 9},
    {"window": 1},
    {"alpha": 0},
    {"beta": 1.0},
    {"elite": 30},
    {"mutation": 2},
    {"policy": "sometimes"},
    {"seed": "abc"},
    {"expand": "maybe"},
    {"bogus": 1},
])
def test_invalid_values(overrides):
    with pytest.raises(ConfigError):
        Config().with_overrides(overrides)


def test_invalid_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json", environ={})
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError, match="line 1"):
        load_config(bad, environ={})
    bad.write_text(json.dumps({"ga": {"nope": 1}}))
    with pytest.raises(ConfigError, match="ga.nope"):
        load_config(bad, environ={})
    bad.write_text(json.dumps({"extra": {}}))
    with pytest.raises(ConfigError):
        load_config(bad, environ={})
    bad.write_text("[]")
    with pytest.raises(ConfigError):
        load_config(bad, environ={})

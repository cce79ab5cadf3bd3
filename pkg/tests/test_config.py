import json
import math

import pytest

from colavmpc import config as cfgm
from colavmpc import scenarios
from colavmpc.config import ConfigError
from colavmpc.obstacles import NOISE_PRESETS


def test_round_trip_all_shipped_scenarios():
    for name in scenarios.SCENARIO_NAMES:
        cfg = scenarios.build_scenario(name)
        again = cfgm.from_dict(cfgm.to_dict(cfg))
        assert cfgm.to_dict(cfg) == cfgm.to_dict(again)


def test_round_trip_waypoints_and_custom_noise():
    data = scenarios.build_config_dict("head_on")
    data["desired"] = {
        "kind": "waypoints",
        "speed": 4.0,
        "points": [{"north": 0.0, "east": 0.0}, {"north": 300.0, "east": 50.0}],
    }
    data["noise"] = {"pos_std": 5.0, "sog_std": 0.1, "course_std": 0.2, "latency": 1.0, "period": 2.5, "seed": 3}
    cfg = cfgm.from_dict(data)
    assert cfg.desired.kind == "waypoints"
    assert cfg.noise.seed == 3
    assert cfg.noise_preset is None
    again = cfgm.from_dict(cfgm.to_dict(cfg))
    assert cfgm.to_dict(cfg) == cfgm.to_dict(again)


def test_obstacle_events_round_trip():
    data = scenarios.build_config_dict("crossing_starboard")
    data["obstacles"][0]["events"] = [{"t": 60.0, "course": -2.3}, {"t": 90.0, "sog": 1.0}]
    cfg = cfgm.from_dict(data)
    assert cfg.obstacles[0].events[0].course == -2.3
    assert cfg.obstacles[0].events[1].sog == 1.0
    assert cfgm.to_dict(cfg)["obstacles"][0]["events"] == data["obstacles"][0]["events"]


def test_noise_preset_lookup_and_override():
    data = scenarios.build_config_dict("head_on", noise="ais")
    cfg = cfgm.from_dict(data)
    assert cfg.noise == NOISE_PRESETS["ais"]
    cfg_radar = cfgm.from_dict(data, noise_override="radar")
    assert cfg_radar.noise == NOISE_PRESETS["radar"]
    assert cfg_radar.noise_preset == "radar"
    with pytest.raises(ConfigError):
        cfgm.from_dict(data, noise_override="sonar")


def test_seed_override():
    data = scenarios.build_config_dict("head_on", seed=1)
    assert cfgm.from_dict(data, seed_override=42).seed == 42


@pytest.mark.parametrize(
    "mutate,fragment",
    [
        (lambda d: d.__setitem__("schema_version", 2), "schema_version"),
        (lambda d: d["planner"].__setitem__("period", 7.0), "period"),
        (lambda d: d["planner"].__setitem__("step_times", [5.0, 20.0, 30.5]), "step_times"),
        (lambda d: d["planner"].__setitem__("t_ramp", 3.0), "planner"),
        (lambda d: d["penalty"].__setitem__("gamma1", 1.2), "gamma1"),
        (lambda d: d["penalty"].__setitem__("a", [50.0, 150.0]), "3 entries"),
        (lambda d: d["weights"].__setitem__("avoid", -1.0), "weights"),
        (lambda d: d["ownship"].__setitem__("sog", -2.0), "ownship"),
        (lambda d: d["desired"].__setitem__("kind", "spiral"), "kind"),
        (lambda d: d.__setitem__("duration", -5.0), "duration"),
        (lambda d: d["obstacles"][0].__setitem__("sog", -1.0), "obstacles"),
        (lambda d: d["noise"].__setitem__("preset", "sonar"), "preset"),
    ],
)
def test_invariant_violations_name_the_key(mutate, fragment):
    data = scenarios.build_config_dict("head_on")
    mutate(data)
    with pytest.raises(ConfigError) as err:
        cfgm.from_dict(data)
    assert fragment in str(err.value)


def test_duplicate_obstacle_ids_rejected():
    data = scenarios.build_config_dict("head_on")
    data["obstacles"].append(dict(data["obstacles"][0]))
    with pytest.raises(ConfigError, match="duplicate"):
        cfgm.from_dict(data)


def test_vessel_override_loaded():
    data = scenarios.build_config_dict("head_on")
    data["vessel"] = {
        "m_u0": 0.5, "m_u1": 0.03, "m_r0": 2.0, "m_r1": 0.2,
        "d_u1": 0.014, "d_u2": 0.0023, "d_r1": 2.0, "d_r2": 3.2, "d_ru": 0.24,
        "tau_min": [0.05, -1.0], "tau_max": [1.0, 1.0],
        "tau_rate_min": [-0.5, -0.5], "tau_rate_max": [0.5, 0.5],
        "u_max": 15.0, "u_min": 2.0,
    }
    cfg = cfgm.from_dict(data)
    assert cfg.vessel.u_max == 15.0
    assert cfg.los.u_max_los == 15.0  # guidance cap follows the model by default


def test_load_rejects_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        cfgm.load(path)
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="object"):
        cfgm.load(path)

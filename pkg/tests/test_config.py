import json

import pytest

from simris.config import PRESETS, SimConfig, load_preset, parse_config
from simris.errors import ConfigError

FIG6A = {"environment": "InH", "scenario": "SideWall", "frequency_ghz": 28, "n_elements": 256,
         "tx": [0, 25, 2], "rx": [38, 48, 1], "ris": [40, 50, 2], "seed": 1}


def test_minimal_config_valid():
    cfg = parse_config(json.dumps(FIG6A))
    assert cfg.seed == 1 and cfg.n_elements == 256
    assert cfg.budget == {"pt_dbm": 30.0, "pn_dbm": -100.0}
    assert cfg.element_spacing is None  # half wavelength
    scene = cfg.scene()
    assert scene.panel.element_spacing(scene.f_hz) == pytest.approx(299_792_458 / 28e9 / 2)


def test_non_square_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config(dict(FIG6A, n_elements=200))
    assert exc.value.path == "n_elements"


def test_missing_seed_defaults_with_warning():
    d = dict(FIG6A)
    del d["seed"]
    with pytest.warns(UserWarning, match="seed"):
        cfg = parse_config(d)
    assert cfg.seed == 0


@pytest.mark.parametrize("bad,path", [
    ({"colour": 1}, "colour"),
    ({"phase": {"mode": "ideal", "bits": 2}}, "phase.bits"),
    ({"frequency_ghz": -1}, "frequency_ghz"),
    ({"rx": [80, 10, 1]}, "rx"),
    ({"tx": [0, 1]}, "tx"),
    ({"phase": {"mode": "quantized"}}, "phase"),
    ({"frequency_ghz": 60}, "lambda_p"),
    ({"include_direct_link": "yes"}, "include_direct_link"),
    ({"sweep": {"power": []}}, "sweep.power"),
])
def test_errors_carry_path(bad, path):
    with pytest.raises(ConfigError) as exc:
        parse_config(dict(FIG6A, **bad))
    assert exc.value.path == path


def test_invalid_json():
    with pytest.raises(ConfigError):
        parse_config(b"{not json")


def test_round_trip_with_inf_kappa():
    cfg = parse_config(dict(FIG6A, phase={"mode": "noisy", "kappa": "inf"}, sweep={"rx": [[1, 2], 3]}))
    assert parse_config(cfg.to_json()) == cfg
    assert cfg.phase_settings().kappa == float("inf")


def test_manifest_accepted():
    cfg = parse_config(FIG6A)
    man = {"version": "0.1.0", "seed": 1, "config": cfg.to_dict()}
    assert parse_config(json.dumps(man)) == cfg


def test_outdoor_allows_positions_outside_room():
    cfg = parse_config(dict(FIG6A, environment="UMi", tx=[0, 25, 20], ris=[70, 85, 10], rx=[50, 50, 1]))
    assert cfg.scene().indoor is False
    with pytest.raises(ConfigError):
        parse_config(dict(FIG6A, environment="UMi", rx=[50, 50, -1]))


@pytest.mark.parametrize("name", PRESETS)
def test_presets_load_and_round_trip(name):
    cfg = load_preset(name)
    cfg.scene().validate()
    assert parse_config(cfg.to_dict()) == cfg


def test_unknown_preset():
    with pytest.raises(ConfigError):
        load_preset("fig99")


def test_custom_path_loss():
    cfg = parse_config(dict(FIG6A, path_loss={"los": {"n": 2.0, "sigma_db": 0.0}}))
    assert cfg.scene().los_profile.n == 2.0


def test_defaults_dataclass():
    assert SimConfig().frequency_ghz == 28.0

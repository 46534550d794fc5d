"""Run configuration: JSON schema, validation, presets and scene building."""

from __future__ import annotations

import copy
import json
import math
import warnings
from dataclasses import dataclass, field, fields
from importlib import resources

from .channel import Scene, default_lambda_p
from .errors import ConfigError
from .geometry import Environment, MountingScenario, Point3, RoomBounds
from .metrics import LinkBudget, PhaseSettings
from .propagation import ElementPattern, PathLossParams, RisPanel
from .ris import PhaseMode

__all__ = ["SimConfig", "parse_config", "load_config", "load_preset", "list_presets", "PRESETS"]

PRESETS = ("fig6a", "fig6b", "fig7a", "fig7b", "fig8", "fig9a", "fig9b", "fig10")

_PHASE_KEYS = {"mode", "q_bits", "kappa"}
_BUDGET_KEYS = {"pt_dbm", "pn_dbm"}
_SWEEP_KEYS = {"power", "rx", "ris", "n"}
_CORR_KEYS = {"realizations"}
_PL_KEYS = {"n", "sigma_db", "b", "f0_ghz"}


@dataclass
class SimConfig:
    """Validated run configuration; ``to_dict`` / ``parse_config`` round-trip."""

    environment: str = "InH"
    scenario: str = "SideWall"
    frequency_ghz: float = 28.0
    n_elements: int = 256
    tx: tuple = (0.0, 25.0, 2.0)
    rx: tuple = (38.0, 48.0, 1.0)
    ris: tuple = (40.0, 50.0, 2.0)
    room: tuple = (75.0, 50.0, 3.5)
    realizations: int = 1000
    seed: int = 0
    phase: dict = field(default_factory=lambda: {"mode": "ideal", "q_bits": None, "kappa": None})
    budget: dict = field(default_factory=lambda: {"pt_dbm": 30.0, "pn_dbm": -100.0})
    include_direct_link: bool = True
    nlos_components: bool = True
    element_spacing: float | None = None
    pattern_q: float | None = None
    lambda_p: float | None = None
    path_loss: dict | None = None
    workers: int = 1
    sweep: dict = field(default_factory=dict)
    corr: dict = field(default_factory=lambda: {"realizations": 500})

    def to_dict(self):
        return copy.deepcopy({f.name: _jsonable(getattr(self, f.name)) for f in fields(self)})

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @property
    def f_hz(self):
        return self.frequency_ghz * 1e9

    def phase_settings(self):
        return PhaseSettings(self.phase["mode"], self.phase.get("q_bits"), self.phase.get("kappa"))

    def link_budget(self):
        return LinkBudget(self.budget["pt_dbm"], self.budget["pn_dbm"])

    def scene(self):
        pattern = ElementPattern() if self.pattern_q is None else ElementPattern(self.pattern_q)
        panel = RisPanel(self.n_elements, Point3(*self.ris), self.scenario, self.element_spacing, pattern)
        profiles = {}
        for key in ("los", "nlos"):
            p = (self.path_loss or {}).get(key)
            if p is not None:
                profiles[f"{key}_profile"] = PathLossParams(
                    p["n"], p["sigma_db"], p.get("b", 0.0), p.get("f0_ghz", 24.2) * 1e9)
        return Scene(
            environment=self.environment,
            tx=Point3(*self.tx),
            rx=Point3(*self.rx),
            panel=panel,
            f_hz=self.f_hz,
            bounds=RoomBounds(*self.room),
            lambda_p=self.lambda_p,
            include_direct_link=self.include_direct_link,
            nlos_components=self.nlos_components,
            **profiles,
        )


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def _num(path, v, *, positive=False, allow_none=False, allow_inf=False):
    if v is None and allow_none:
        return None
    if allow_inf and isinstance(v, str) and v.lower() in ("inf", "infinity"):
        return math.inf
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {v!r}")
    v = float(v)
    if math.isnan(v) or (math.isinf(v) and not allow_inf):
        raise ConfigError(path, "must be finite")
    if positive and not v > 0:
        raise ConfigError(path, "must be positive")
    return v


def _int(path, v, *, minimum=None):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or float(v) != int(v):
        raise ConfigError(path, f"expected an integer, got {v!r}")
    v = int(v)
    if minimum is not None and v < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    return v


def _bool(path, v):
    if not isinstance(v, bool):
        raise ConfigError(path, f"expected true or false, got {v!r}")
    return v


def _point(path, v):
    if not isinstance(v, (list, tuple)) or len(v) != 3:
        raise ConfigError(path, "expected [x, y, z]")
    return tuple(_num(f"{path}[{i}]", x) for i, x in enumerate(v))


def _sub(path, v, allowed):
    if not isinstance(v, dict):
        raise ConfigError(path, "expected an object")
    for k in v:
        if k not in allowed:
            raise ConfigError(f"{path}.{k}", "unknown key")
    return v


def _grid_entry(path, v):
    if isinstance(v, (list, tuple)):
        if len(v) not in (2, 3):
            raise ConfigError(path, "expected a number or [x, y] / [x, y, z]")
        return [_num(f"{path}[{i}]", x) for i, x in enumerate(v)]
    return _num(path, v)


def parse_config(data):
    """Validate raw JSON text, bytes or a mapping into a :class:`SimConfig`.

    A run manifest (an object with a ``config`` entry) is accepted too.
    """
    if isinstance(data, (bytes, str)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected a JSON object")
    if "config" in data and "version" in data:
        data = data["config"]
        if not isinstance(data, dict):
            raise ConfigError("config", "expected a JSON object")
    known = {f.name for f in fields(SimConfig)}
    for k in data:
        if k not in known:
            raise ConfigError(k, "unknown key")
    cfg = SimConfig()
    out = {}

    try:
        env = Environment.parse(data.get("environment", cfg.environment))
    except ValueError as exc:
        raise ConfigError("environment", str(exc)) from None
    out["environment"] = env.value
    try:
        out["scenario"] = MountingScenario.parse(data.get("scenario", cfg.scenario)).value
    except ValueError as exc:
        raise ConfigError("scenario", str(exc)) from None
    out["frequency_ghz"] = _num("frequency_ghz", data.get("frequency_ghz", cfg.frequency_ghz), positive=True)
    n = _int("n_elements", data.get("n_elements", cfg.n_elements), minimum=1)
    if math.isqrt(n) ** 2 != n:
        raise ConfigError("n_elements", f"{n} is not a perfect square")
    out["n_elements"] = n
    for key in ("tx", "rx", "ris"):
        out[key] = _point(key, data.get(key, getattr(cfg, key)))
    room = data.get("room", cfg.room)
    out["room"] = _point("room", room)
    if min(out["room"]) <= 0:
        raise ConfigError("room", "dimensions must be positive")
    out["realizations"] = _int("realizations", data.get("realizations", cfg.realizations), minimum=1)
    if "seed" not in data:
        warnings.warn("no seed given; using the default seed 0", UserWarning, stacklevel=2)
    out["seed"] = _int("seed", data.get("seed", 0), minimum=0)

    phase = dict(cfg.phase)
    phase.update(_sub("phase", data.get("phase", {}), _PHASE_KEYS))
    try:
        phase["mode"] = PhaseMode.parse(phase["mode"]).value
    except ValueError as exc:
        raise ConfigError("phase.mode", str(exc)) from None
    if phase.get("q_bits") is not None:
        phase["q_bits"] = _int("phase.q_bits", phase["q_bits"], minimum=1)
    if phase.get("kappa") is not None:
        phase["kappa"] = _num("phase.kappa", phase["kappa"], allow_inf=True)
        if phase["kappa"] < 0:
            raise ConfigError("phase.kappa", "must be >= 0")
    try:
        PhaseSettings(phase["mode"], phase.get("q_bits"), phase.get("kappa"))
    except ValueError as exc:
        raise ConfigError("phase", str(exc)) from None
    out["phase"] = phase

    budget = dict(cfg.budget)
    budget.update(_sub("budget", data.get("budget", {}), _BUDGET_KEYS))
    out["budget"] = {k: _num(f"budget.{k}", v) for k, v in budget.items()}

    for key in ("include_direct_link", "nlos_components"):
        out[key] = _bool(key, data.get(key, getattr(cfg, key)))
    out["element_spacing"] = _num("element_spacing", data.get("element_spacing"), positive=True, allow_none=True)
    q = _num("pattern_q", data.get("pattern_q"), allow_none=True)
    if q is not None and not q > -0.5:
        raise ConfigError("pattern_q", "must exceed -1/2")
    out["pattern_q"] = q
    out["lambda_p"] = _num("lambda_p", data.get("lambda_p"), positive=True, allow_none=True)
    if out["lambda_p"] is None:
        try:
            default_lambda_p(out["frequency_ghz"] * 1e9)
        except ValueError as exc:
            raise ConfigError("lambda_p", str(exc)) from None

    pl = data.get("path_loss")
    if pl is not None:
        _sub("path_loss", pl, {"los", "nlos"})
        clean = {}
        for key, prof in pl.items():
            _sub(f"path_loss.{key}", prof, _PL_KEYS)
            for req in ("n", "sigma_db"):
                if req not in prof:
                    raise ConfigError(f"path_loss.{key}.{req}", "missing")
            clean[key] = {
                "n": _num(f"path_loss.{key}.n", prof["n"], positive=True),
                "sigma_db": _num(f"path_loss.{key}.sigma_db", prof["sigma_db"]),
                "b": _num(f"path_loss.{key}.b", prof.get("b", 0.0)),
                "f0_ghz": _num(f"path_loss.{key}.f0_ghz", prof.get("f0_ghz", 24.2), positive=True),
            }
            if clean[key]["sigma_db"] < 0:
                raise ConfigError(f"path_loss.{key}.sigma_db", "must be >= 0")
        pl = clean
    out["path_loss"] = pl
    out["workers"] = _int("workers", data.get("workers", cfg.workers), minimum=1)

    sweep = _sub("sweep", data.get("sweep", {}), _SWEEP_KEYS)
    clean = {}
    for key, grid in sweep.items():
        if not isinstance(grid, list) or not grid:
            raise ConfigError(f"sweep.{key}", "expected a non-empty list")
        if key in ("power",):
            clean[key] = [_num(f"sweep.{key}[{i}]", v) for i, v in enumerate(grid)]
        elif key == "n":
            clean[key] = [_int(f"sweep.n[{i}]", v, minimum=1) for i, v in enumerate(grid)]
        else:
            clean[key] = [_grid_entry(f"sweep.{key}[{i}]", v) for i, v in enumerate(grid)]
    out["sweep"] = clean

    corr = dict(cfg.corr)
    corr.update(_sub("corr", data.get("corr", {}), _CORR_KEYS))
    corr["realizations"] = _int("corr.realizations", corr["realizations"], minimum=2)
    out["corr"] = corr

    if env is Environment.INDOOR:
        bounds = RoomBounds(*out["room"])
        for key in ("tx", "rx", "ris"):
            if not bounds.contains(out[key]):
                raise ConfigError(key, f"{out[key]} lies outside the room {out['room']}")
    else:
        for key in ("tx", "rx", "ris"):
            if out[key][2] < 0:
                raise ConfigError(f"{key}[2]", "must be >= 0 outdoors")
    return SimConfig(**out)


def load_config(path):
    with open(path, "rb") as fh:
        return parse_config(fh.read())


def list_presets():
    return list(PRESETS)


def load_preset(name):
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    text = resources.files("simris").joinpath("presets").joinpath(f"{name}.json").read_bytes()
    return parse_config(text)


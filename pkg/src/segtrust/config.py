"""Scenario files.

A scenario is a YAML mapping (JSON is accepted too, being a YAML subset)::

    name: demo
    highway: {length: 2000, lanes: 4, lane_width: 3.5, h: 300, dt: 1}
    thresholds: {psi_h: 0.6, psi_l: 12, psi_t: 0.5}   # psi_h: default per vehicle
    weights: {delta_d: 1, delta_h: 1, delta_t: 0.1, delta_f: 1, gamma: 0.8}
    crypto: {key_bits: 512, seed: 7}
    sim: {duration: 10, seed: 1, hop_latency: 0.01, centrality_basis: social,
          z_max: 4, t_exp_ms: 1.1}
    fixed_point_scale: 100
    vehicles:
      - {id: A, entry_time: 0, lane: 0, speed: 25, x: 100, profile: [1, 0, 1], psi_h: 0.6}
    arrivals: {rate: 0.2, seed: 3, speed_min: 20, speed_max: 35}   # optional Poisson
    queries:
      - {s: A, d: B, at: 0}

``x`` is optional; without it a vehicle enters at the upstream end of the
road for its direction of travel.  Negative speeds drive toward ``x = 0``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .mobility import HighwayConfig
from .seg import COMM, SOCIAL, Thresholds, TrustWeights


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class CryptoConfig:
    key_bits: int = 512
    seed: int = 0


@dataclass(frozen=True)
class SimConfig:
    duration: float = 10.0
    seed: int = 0
    hop_latency: float = 0.01
    centrality_basis: str = SOCIAL
    z_max: int = 4
    t_exp_ms: float = 1.1  # exponentiation cost used for the modelled decrypt time


@dataclass(frozen=True)
class PoissonConfig:
    rate: float
    seed: int = 0
    speed_min: float = 20.0
    speed_max: float = 35.0
    profile_density: float = 0.5


@dataclass(frozen=True)
class VehicleSpec:
    id: str
    entry_time: float
    lane: int
    speed: float
    profile: tuple[int, ...]
    psi_h: float
    x: float | None = None


@dataclass(frozen=True)
class QuerySpec:
    s: str
    d: str
    at: float


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "scenario"
    highway: HighwayConfig = field(default_factory=HighwayConfig)
    thresholds: Thresholds = field(default_factory=Thresholds)
    weights: TrustWeights = field(default_factory=TrustWeights)
    crypto: CryptoConfig = field(default_factory=CryptoConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    fixed_point_scale: int = 100
    vehicles: tuple[VehicleSpec, ...] = ()
    arrivals: PoissonConfig | None = None
    queries: tuple[QuerySpec, ...] = ()
    profile_length: int | None = None  # needed only with Poisson arrivals and no vehicles

    @property
    def w(self) -> int | None:
        if self.vehicles:
            return len(self.vehicles[0].profile)
        return self.profile_length


def _section(cls, data: Any, name: str):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(name, "expected a mapping")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{name}.{sorted(unknown)[0]}", "unknown field")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(name, str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(name, str(exc)) from exc


def _number(value, name: str, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"expected a number, got {value!r}")
    if kind is int and int(value) != value:
        raise ConfigError(name, f"expected an integer, got {value!r}")
    return kind(value)


def from_dict(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "scenario must be a mapping")
    top = {f.name for f in dataclasses.fields(ScenarioConfig)}
    unknown = set(data) - top
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field")

    highway = _section(HighwayConfig, data.get("highway"), "highway")
    thresholds = _section(Thresholds, data.get("thresholds"), "thresholds")
    weights = _section(TrustWeights, data.get("weights"), "weights")
    crypto = _section(CryptoConfig, data.get("crypto"), "crypto")
    sim = _section(SimConfig, data.get("sim"), "sim")
    if crypto.key_bits < 16:
        raise ConfigError("crypto.key_bits", "must be at least 16")
    if sim.centrality_basis not in (SOCIAL, COMM):
        raise ConfigError("sim.centrality_basis", f"must be {SOCIAL!r} or {COMM!r}")
    if sim.duration < 0:
        raise ConfigError("sim.duration", "must be non-negative")
    if sim.z_max < 1:
        raise ConfigError("sim.z_max", "must be at least 1")
    scale = _number(data.get("fixed_point_scale", 100), "fixed_point_scale", int)
    if scale < 1:
        raise ConfigError("fixed_point_scale", "must be positive")

    vehicles = []
    seen = set()
    for i, v in enumerate(data.get("vehicles") or []):
        where = f"vehicles[{i}]"
        if not isinstance(v, dict):
            raise ConfigError(where, "expected a mapping")
        for key in ("id", "lane", "speed", "profile"):
            if key not in v:
                raise ConfigError(f"{where}.{key}", "missing")
        extra = set(v) - {f.name for f in dataclasses.fields(VehicleSpec)}
        if extra:
            raise ConfigError(f"{where}.{sorted(extra)[0]}", "unknown field")
        vid = str(v["id"])
        if vid in seen:
            raise ConfigError(f"{where}.id", f"duplicate id {vid!r}")
        seen.add(vid)
        lane = _number(v["lane"], f"{where}.lane", int)
        if not 0 <= lane < highway.lanes:
            raise ConfigError(f"{where}.lane", f"must lie in [0, {highway.lanes})")
        profile = v["profile"]
        if not isinstance(profile, list) or any(b not in (0, 1) for b in profile):
            raise ConfigError(f"{where}.profile", "must be a list of 0/1")
        psi_h = _number(v.get("psi_h", thresholds.psi_h), f"{where}.psi_h")
        if not 0.0 <= psi_h <= 1.0:
            raise ConfigError(f"{where}.psi_h", "must lie in [0, 1]")
        x = v.get("x")
        if x is not None:
            x = _number(x, f"{where}.x")
            if not 0.0 <= x <= highway.length:
                raise ConfigError(f"{where}.x", f"must lie in [0, {highway.length}]")
        vehicles.append(VehicleSpec(id=vid, entry_time=_number(v.get("entry_time", 0.0), f"{where}.entry_time"),
                                    lane=lane, speed=_number(v["speed"], f"{where}.speed"),
                                    profile=tuple(profile), psi_h=psi_h, x=x))
    lengths = {len(v.profile) for v in vehicles}
    if len(lengths) > 1:
        raise ConfigError("vehicles", "interest profiles must all have the same length")

    arrivals = None
    if data.get("arrivals") is not None:
        arrivals = _section(PoissonConfig, data["arrivals"], "arrivals")
        if arrivals.rate <= 0:
            raise ConfigError("arrivals.rate", "must be positive")

    profile_length = data.get("profile_length")
    if profile_length is not None:
        profile_length = _number(profile_length, "profile_length", int)
        if lengths and profile_length not in lengths:
            raise ConfigError("profile_length", "disagrees with the vehicles' profiles")
    if arrivals is not None and not vehicles and profile_length is None:
        raise ConfigError("profile_length", "required when only Poisson arrivals are configured")

    queries = []
    for i, q in enumerate(data.get("queries") or []):
        where = f"queries[{i}]"
        if not isinstance(q, dict) or not {"s", "d", "at"} <= set(q):
            raise ConfigError(where, "needs s, d and at")
        if str(q["s"]) == str(q["d"]):
            raise ConfigError(where, "s and d must differ")
        queries.append(QuerySpec(str(q["s"]), str(q["d"]), _number(q["at"], f"{where}.at")))

    return ScenarioConfig(name=str(data.get("name", "scenario")), highway=highway,
                          thresholds=thresholds, weights=weights, crypto=crypto, sim=sim,
                          fixed_point_scale=scale, vehicles=tuple(vehicles), arrivals=arrivals,
                          queries=tuple(queries), profile_length=profile_length)


def to_dict(cfg: ScenarioConfig) -> dict:
    out = {
        "name": cfg.name,
        "highway": dataclasses.asdict(cfg.highway),
        "thresholds": dataclasses.asdict(cfg.thresholds),
        "weights": dataclasses.asdict(cfg.weights),
        "crypto": dataclasses.asdict(cfg.crypto),
        "sim": dataclasses.asdict(cfg.sim),
        "fixed_point_scale": cfg.fixed_point_scale,
        "vehicles": [],
        "queries": [dataclasses.asdict(q) for q in cfg.queries],
    }
    for v in cfg.vehicles:
        rec = dataclasses.asdict(v)
        rec["profile"] = list(v.profile)
        if v.x is None:
            del rec["x"]
        out["vehicles"].append(rec)
    if cfg.arrivals is not None:
        out["arrivals"] = dataclasses.asdict(cfg.arrivals)
    if cfg.profile_length is not None:
        out["profile_length"] = cfg.profile_length
    return out


def loads(text: str) -> ScenarioConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<syntax>", str(exc)) from exc
    return from_dict(data)


def dumps(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False, default_flow_style=None)


def load(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("<file>", str(exc)) from exc
    return loads(text)


def bundled(name: str) -> Path:
    """Path of a scenario shipped with the package (``fig2`` or ``fig3``)."""
    return Path(__file__).parent / "scenarios" / f"{name}.scenario"

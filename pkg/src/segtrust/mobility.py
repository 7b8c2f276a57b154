"""Highway kinematics: constant-velocity vehicles, arrivals, and BSM beacons."""
from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence


@dataclass(frozen=True)
class VehicleState:
    id: str
    x: float
    y: float
    v: float  # signed; sign gives the direction of travel
    lane: int = 0


@dataclass(frozen=True)
class HighwayConfig:
    length: float = 5000.0
    lanes: int = 4
    lane_width: float = 3.5
    h: float = 300.0
    dt: float = 1.0

    def __post_init__(self):
        if self.h <= 0 or self.dt <= 0:
            raise ValueError("communication range and time step must be positive")
        if self.length <= 0 or self.lanes < 1 or self.lane_width <= 0:
            raise ValueError("highway geometry must be positive")

    def lane_y(self, lane: int) -> float:
        return (lane + 0.5) * self.lane_width


@dataclass(frozen=True)
class BsmRecord:
    sender: str
    time: float
    x: float
    y: float
    v: float
    profile: tuple[int, ...]
    psi_h: float


@dataclass(frozen=True)
class Arrival:
    time: float
    id: str
    lane: int
    speed: float
    x: float | None = None  # None: enter at the upstream end for the direction of travel


class MotionCase(enum.Enum):
    """Relative motion of an ordered pair, carrying Eq.-3 style (theta, vartheta)."""

    OVERTAKING = (-1, 1)
    FORWARD_IN_FRONT = (1, 1)
    TOWARD_EACH_OTHER = (-1, -1)
    AWAY_FROM_EACH_OTHER = (1, -1)

    @property
    def theta(self) -> int:
        return self.value[0]

    @property
    def vartheta(self) -> int:
        return self.value[1]


def classify_motion(state_i: VehicleState, state_j: VehicleState) -> MotionCase:
    """Pick the motion case for the pair (i, j).

    Same direction means the signs of the velocities agree (a stopped vehicle
    counts as travelling with the other one).  Within a direction, the gap is
    either closing or not; equal speeds count as "forward in front", which
    gives a zero denominator and an unbounded duration.
    """
    dx = state_i.x - state_j.x
    dv = state_i.v - state_j.v
    closing = dx * dv < 0
    opposite = state_i.v * state_j.v < 0
    if opposite:
        return MotionCase.TOWARD_EACH_OTHER if closing else MotionCase.AWAY_FROM_EACH_OTHER
    return MotionCase.OVERTAKING if closing else MotionCase.FORWARD_IN_FRONT


def distance(a: VehicleState, b: VehicleState) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def step(states: Iterable[VehicleState], cfg: HighwayConfig) -> list[VehicleState]:
    """Advance every vehicle by one time step; vehicles leaving the road are dropped."""
    moved = []
    for s in states:
        x = s.x + s.v * cfg.dt
        if 0.0 <= x <= cfg.length:
            moved.append(replace(s, x=x))
    return moved


def spawn(arrival: Arrival, cfg: HighwayConfig) -> VehicleState:
    if arrival.x is not None:
        x = arrival.x
    else:
        x = 0.0 if arrival.speed >= 0 else cfg.length
    return VehicleState(id=arrival.id, x=x, y=cfg.lane_y(arrival.lane), v=arrival.speed,
                        lane=arrival.lane)


def poisson_arrivals(rate: float, duration: float, cfg: HighwayConfig, rng: random.Random,
                     speed_range: tuple[float, float] = (20.0, 35.0),
                     prefix: str = "p") -> list[Arrival]:
    """Seeded Poisson arrival schedule.  Lanes below ``lanes // 2`` drive in +x."""
    out = []
    t = rng.expovariate(rate)
    k = 0
    while t < duration:
        lane = rng.randrange(cfg.lanes)
        speed = rng.uniform(*speed_range)
        if lane >= max(1, cfg.lanes // 2):
            speed = -speed
        out.append(Arrival(time=t, id=f"{prefix}{k}", lane=lane, speed=speed))
        k += 1
        t += rng.expovariate(rate)
    return out


@dataclass
class Traffic:
    """Mutable driver around :func:`step` that also injects scheduled arrivals."""

    cfg: HighwayConfig
    schedule: Sequence[Arrival]
    time: float = 0.0
    states: list[VehicleState] = field(default_factory=list)

    def __post_init__(self):
        self._pending = sorted(self.schedule, key=lambda a: (a.time, a.id))
        self._admit()

    def _admit(self) -> None:
        # small epsilon so that entry_time == t is admitted despite float drift
        while self._pending and self._pending[0].time <= self.time + 1e-9:
            self.states.append(spawn(self._pending.pop(0), self.cfg))
        self.states.sort(key=lambda s: s.id)

    def advance(self) -> list[VehicleState]:
        self.states = step(self.states, self.cfg)
        self.time = round(self.time + self.cfg.dt, 9)
        self._admit()
        return self.states


def broadcast_bsms(states: Iterable[VehicleState], profiles: Mapping[str, Sequence[int]],
                   psi_h: Mapping[str, float], t: float) -> list[BsmRecord]:
    return [BsmRecord(sender=s.id, time=t, x=s.x, y=s.y, v=s.v,
                      profile=tuple(profiles[s.id]), psi_h=psi_h[s.id]) for s in states]


def bsm_receivers(records: Iterable[BsmRecord], h: float) -> dict[str, list[str]]:
    """Who hears whom: receiver id -> sorted ids of senders within range ``h``."""
    records = list(records)
    heard: dict[str, list[str]] = {r.sender: [] for r in records}
    for a in records:
        for b in records:
            if a.sender != b.sender and math.hypot(a.x - b.x, a.y - b.y) <= h:
                heard[b.sender].append(a.sender)
    return {k: sorted(v) for k, v in heard.items()}

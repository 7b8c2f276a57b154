"""Social evolving graph: snapshots, social metrics and direct trust.

A snapshot holds every vehicle alive at one instant, the undirected
communication links (pairs within range ``h``) and, for every ordered pair in
range, a :class:`SocialEdge` annotated with ``(t, ET, SHP, TST)`` and whether
the link qualifies as an established social link.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

from .mobility import MotionCase, VehicleState, classify_motion, distance

log = logging.getLogger(__name__)

SOCIAL = "social"
COMM = "comm"


class _Unbounded:
    """Link duration with zero relative speed.  Compares above every number."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"

    def __reduce__(self):
        return (_Unbounded, ())

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("segtrust.UNBOUNDED")

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self


UNBOUNDED = _Unbounded()
Duration = Union[float, _Unbounded]


class ProfileError(ValueError):
    pass


class NotInRangeError(ValueError):
    pass


class JourneyLookupError(LookupError):
    pass


class CentralityUndefined(UserWarning):
    """Raised as a warning when a snapshot has a single vehicle."""


def duration_to_json(et: Duration):
    return "unbounded" if et is UNBOUNDED else et


def duration_from_json(value) -> Duration:
    return UNBOUNDED if value == "unbounded" else float(value)


@dataclass(frozen=True)
class InterestProfile:
    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise ProfileError("interest profiles are binary vectors")

    def __len__(self):
        return len(self.bits)


@dataclass(frozen=True)
class VehicleNode:
    id: str
    profile: InterestProfile
    psi_h: float = 0.6

    def __post_init__(self):
        if not 0.0 <= self.psi_h <= 1.0:
            raise ValueError(f"psi_h of {self.id} must lie in [0, 1]")


@dataclass(frozen=True)
class Thresholds:
    psi_h: float = 0.6
    psi_l: float = 12.0
    psi_t: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.psi_h <= 1.0:
            raise ValueError("psi_h must lie in [0, 1]")
        if self.psi_l <= 0:
            raise ValueError("psi_l must be positive")
        if not -1.0 <= self.psi_t <= 1.0:
            raise ValueError("psi_t must lie in [-1, 1]")


@dataclass(frozen=True)
class TrustWeights:
    delta_d: float = 1.0
    delta_h: float = 1.0
    delta_t: float = 0.1
    delta_f: float = 1.0
    gamma: float = 0.8  # per-hop opinion decay

    def __post_init__(self):
        for name in ("delta_d", "delta_h", "delta_f"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not -1.0 <= self.delta_t <= 0.1:
            raise ValueError("delta_t must lie in [-1, 0.1]")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")


@dataclass(frozen=True)
class SocialEdge:
    source: str
    target: str
    t: float
    et: Duration
    shp: float
    tst: float
    established: bool

    def to_dict(self) -> dict:
        return {"source": self.source, "target": self.target, "t": self.t,
                "et": duration_to_json(self.et), "shp": self.shp, "tst": self.tst,
                "established": self.established}

    @classmethod
    def from_dict(cls, d: dict) -> "SocialEdge":
        return cls(source=d["source"], target=d["target"], t=float(d["t"]),
                   et=duration_from_json(d["et"]), shp=float(d["shp"]), tst=float(d["tst"]),
                   established=bool(d["established"]))


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class SegSnapshot:
    index: int
    time: float
    nodes: Mapping[str, VehicleNode]
    comm_edges: frozenset
    social_edges: Mapping[tuple[str, str], SocialEdge]
    states: Mapping[str, VehicleState] = field(default_factory=dict)
    centrality_basis: str = SOCIAL
    # centrality that fed the direct-trust term when the snapshot was built
    build_centrality: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("nodes", "social_edges", "states", "build_centrality"):
            object.__setattr__(self, name, MappingProxyType(dict(getattr(self, name))))
        object.__setattr__(self, "comm_edges", frozenset(_pair(*e) for e in self.comm_edges))
        self._adjacency  # noqa: B018  (build the cache eagerly; snapshot is immutable)

    @property
    def W(self) -> int:
        return len(self.nodes)

    @property
    def _adjacency(self) -> Mapping[str, tuple[str, ...]]:
        cached = self.__dict__.get("_adj")
        if cached is None:
            out: dict[str, list[str]] = {v: [] for v in self.nodes}
            for (a, b), e in self.social_edges.items():
                if e.established:
                    out.setdefault(a, []).append(b)
            cached = {k: tuple(sorted(v)) for k, v in out.items()}
            object.__setattr__(self, "_adj", cached)
        return cached

    def in_comm_range(self, a: str, b: str) -> bool:
        return _pair(a, b) in self.comm_edges

    def social_successors(self, v: str) -> tuple[str, ...]:
        """Targets of established social links leaving ``v`` (sorted)."""
        return self._adjacency.get(v, ())

    def established_edges(self) -> list[SocialEdge]:
        return [e for e in self.social_edges.values() if e.established]

    def edge(self, a: str, b: str) -> SocialEdge | None:
        return self.social_edges.get((a, b))

    def to_dict(self) -> dict:
        nodes = []
        for vid in sorted(self.nodes):
            node = self.nodes[vid]
            st = self.states.get(vid)
            rec = {"id": vid, "profile": list(node.profile.bits), "psi_h": node.psi_h}
            if st is not None:
                rec.update(x=st.x, y=st.y, v=st.v, lane=st.lane)
            nodes.append(rec)
        return {
            "index": self.index,
            "time": self.time,
            "centrality_basis": self.centrality_basis,
            "nodes": nodes,
            "build_centrality": {k: self.build_centrality[k] for k in sorted(self.build_centrality)},
            "comm_edges": [list(e) for e in sorted(self.comm_edges)],
            "social_edges": [self.social_edges[k].to_dict() for k in sorted(self.social_edges)],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SegSnapshot":
        nodes, states = {}, {}
        for rec in d["nodes"]:
            nodes[rec["id"]] = VehicleNode(rec["id"], InterestProfile(rec["profile"]), rec["psi_h"])
            if "x" in rec:
                states[rec["id"]] = VehicleState(rec["id"], rec["x"], rec["y"], rec["v"],
                                                 rec.get("lane", 0))
        edges = [SocialEdge.from_dict(e) for e in d["social_edges"]]
        return cls(index=d["index"], time=d["time"], nodes=nodes,
                   comm_edges=frozenset(tuple(e) for e in d["comm_edges"]),
                   social_edges={(e.source, e.target): e for e in edges}, states=states,
                   centrality_basis=d.get("centrality_basis", SOCIAL),
                   build_centrality=d.get("build_centrality", {}))


@dataclass
class SegTimeline:
    snapshots: list[SegSnapshot] = field(default_factory=list)

    def append(self, snap: SegSnapshot) -> None:
        if self.snapshots and snap.time <= self.snapshots[-1].time:
            raise ValueError("snapshot times must strictly increase")
        self.snapshots.append(snap)

    def at(self, time: float) -> SegSnapshot:
        for snap in self.snapshots:
            if math.isclose(snap.time, time, abs_tol=1e-9):
                return snap
        raise JourneyLookupError(f"no snapshot at t={time}")

    def latest(self) -> SegSnapshot | None:
        return self.snapshots[-1] if self.snapshots else None

    def __len__(self):
        return len(self.snapshots)

    def __iter__(self):
        return iter(self.snapshots)


def homophily(hp_i: InterestProfile, hp_j: InterestProfile) -> float:
    """Cosine similarity of two binary interest profiles; 0 if either is empty."""
    if len(hp_i) != len(hp_j):
        raise ProfileError(f"profile lengths differ ({len(hp_i)} vs {len(hp_j)})")
    common = sum(a & b for a, b in zip(hp_i.bits, hp_j.bits))
    ni, nj = sum(hp_i.bits), sum(hp_j.bits)
    if ni == 0 or nj == 0:
        return 0.0
    # binary vectors: squared norms equal the popcounts
    return common / math.sqrt(ni * nj)


def degree_centrality(snapshot: SegSnapshot, v: str, basis: str | None = None) -> float:
    """Fraction of the other W-1 vehicles that ``v`` is linked to.

    ``basis="social"`` counts vehicles sharing an established social link with
    ``v`` in either direction; ``basis="comm"`` counts communication links.
    """
    if v not in snapshot.nodes:
        raise KeyError(v)
    basis = basis or snapshot.centrality_basis
    if snapshot.W < 2:
        warnings.warn("degree centrality is undefined for a single vehicle", CentralityUndefined)
        return 0.0
    if basis == COMM:
        count = sum(1 for e in snapshot.comm_edges if v in e)
    elif basis == SOCIAL:
        linked = {b for (a, b), e in snapshot.social_edges.items() if e.established and a == v}
        linked |= {a for (a, b), e in snapshot.social_edges.items() if e.established and b == v}
        count = len(linked)
    else:
        raise ValueError(f"unknown centrality basis {basis!r}")
    return count / (snapshot.W - 1)


def expected_link_duration(state_i: VehicleState, state_j: VehicleState, h: float,
                           case: MotionCase | None = None) -> Duration:
    """Expected remaining link lifetime from relative kinematics.

    ``case`` overrides the automatic motion classification; speeds enter the
    formula as magnitudes, the case supplies the signs.
    """
    d = distance(state_i, state_j)
    if d > h:
        raise NotInRangeError(f"{state_i.id} and {state_j.id} are {d:.1f} m apart (> {h})")
    case = case or classify_motion(state_i, state_j)
    denom = abs(abs(state_i.v) - case.vartheta * abs(state_j.v))
    if denom == 0:
        return UNBOUNDED
    return (h - case.theta * d) / denom


def clamp_trust(x: float) -> float:
    return max(-1.0, min(1.0, x))


def direct_trust(c_d: float, shp: float, prior: float | None, w: TrustWeights) -> float:
    """Trust in a neighbour from its centrality, shared interests and the previous estimate."""
    prior = 0.0 if prior is None else prior
    return clamp_trust((w.delta_d * c_d) * (w.delta_h * shp) + w.delta_t * prior)


# values this close to a threshold count as equal to it, and equality rejects;
# keeps e.g. 0.375 * 0.8 == 0.3 from passing a 0.3 threshold through rounding
THRESHOLD_TOL = 1e-9


def can_establish(shp: float, et: Duration, tst: float, th: Thresholds) -> bool:
    return (shp > th.psi_h + THRESHOLD_TOL and et > th.psi_l + THRESHOLD_TOL
            and tst > th.psi_t + THRESHOLD_TOL)


def pair_psi_h(a: VehicleNode, b: VehicleNode) -> float:
    """Both parties advertise a homophily threshold; the stricter one governs the pair."""
    return max(a.psi_h, b.psi_h)


def build_snapshot(states: Iterable[VehicleState], nodes: Mapping[str, VehicleNode],
                   prev: SegSnapshot | None, t: float, th: Thresholds, w: TrustWeights,
                   h: float, basis: str = SOCIAL, index: int | None = None) -> SegSnapshot:
    """Build the SEG snapshot at time ``t`` from the vehicles' beaconed states.

    The centrality that feeds the trust estimate cannot count established
    links (establishment itself depends on trust), so at build time the social
    basis counts the trust-independent part of the link test: shared interests
    above the pair's homophily threshold and a long enough expected duration.
    """
    states = {s.id: s for s in states}
    if set(states) - set(nodes):
        raise KeyError(f"states without node records: {sorted(set(states) - set(nodes))}")
    ids = sorted(states)
    W = len(ids)

    comm, shp, et, eligible = [], {}, {}, {}
    for a_idx, a in enumerate(ids):
        for b in ids[a_idx + 1:]:
            if distance(states[a], states[b]) > h:
                continue
            comm.append((a, b))
            s_ab = homophily(nodes[a].profile, nodes[b].profile)
            e_ab = expected_link_duration(states[a], states[b], h)
            shp[(a, b)] = shp[(b, a)] = s_ab
            et[(a, b)] = et[(b, a)] = e_ab
            ok = (s_ab > pair_psi_h(nodes[a], nodes[b]) + THRESHOLD_TOL
                  and e_ab > th.psi_l + THRESHOLD_TOL)
            eligible[(a, b)] = eligible[(b, a)] = ok

    degree = {v: 0 for v in ids}
    for a, b in comm:
        if basis == COMM or eligible[(a, b)]:
            degree[a] += 1
            degree[b] += 1
    centrality = {v: (degree[v] / (W - 1) if W > 1 else 0.0) for v in ids}

    edges = {}
    for (a, b), s_ab in shp.items():
        prior = None
        if prev is not None and (a, b) in prev.social_edges:
            prior = prev.social_edges[(a, b)].tst
        tst = direct_trust(centrality[b], s_ab, prior, w)
        pair_th = Thresholds(psi_h=pair_psi_h(nodes[a], nodes[b]), psi_l=th.psi_l, psi_t=th.psi_t)
        edges[(a, b)] = SocialEdge(source=a, target=b, t=t, et=et[(a, b)], shp=s_ab, tst=tst,
                                   established=can_establish(s_ab, et[(a, b)], tst, pair_th))

    if index is None:
        index = prev.index + 1 if prev is not None else 0
    return SegSnapshot(index=index, time=t, nodes={v: nodes[v] for v in ids},
                       comm_edges=frozenset(comm), social_edges=edges, states=states,
                       centrality_basis=basis, build_centrality=centrality)


def is_journey(timeline: SegTimeline, path: Sequence[str], times: Sequence[float],
               social: bool = False) -> bool:
    """True iff every hop exists at its labelled time and labels strictly increase."""
    if len(times) != len(path) - 1:
        raise ValueError("need exactly one time label per hop")
    for (a, b), t in zip(zip(path, path[1:]), times):
        snap = timeline.at(t)
        if social:
            e = snap.edge(a, b)
            present = e is not None and e.established
        else:
            present = snap.in_comm_range(a, b)
        if not present:
            raise JourneyLookupError(f"edge {a}-{b} not present at t={t}")
    return all(t1 < t2 for t1, t2 in zip(times, times[1:]))

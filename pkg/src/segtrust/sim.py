"""Scenario driver: step the traffic, rebuild the SEG, run scheduled queries."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import paillier
from .config import ScenarioConfig
from .mobility import Arrival, Traffic, VehicleState, broadcast_bsms, poisson_arrivals
from .routing import DegenerateQueryError, UnknownVehicleError
from .seg import InterestProfile, SegSnapshot, SegTimeline, VehicleNode, build_snapshot
from .simnet import Network
from .trust import IndirectTrustResult, UnreachableTargetError, initiate

log = logging.getLogger(__name__)

METRICS_COLUMNS = ("query_id", "s", "d", "routes", "messages", "decrypt_ms", "tst_sd")


class VehicleAbsentError(LookupError):
    pass


@dataclass
class QueryOutcome:
    query_id: str
    s: str
    d: str
    at: float
    result: IndirectTrustResult | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        out = {"query_id": self.query_id, "s": self.s, "d": self.d, "at": self.at}
        if self.error:
            out["error"] = self.error
        r = self.result
        if r is not None:
            out.update(tst_sd=r.tst_sd, direct=r.direct, c_d=r.c_d, shp=r.shp,
                       op_f=list(r.op_f), contributors=list(r.contributors),
                       messages=r.messages_sent, flagged_routes=list(r.flagged_routes),
                       routes=[list(x) for x in r.routes_used.routes] if r.routes_used else [],
                       decrypt_ms_measured=list(r.decrypt_ms))
        return out


def step_summary(snap: SegSnapshot) -> dict:
    est = snap.established_edges()
    return {"index": snap.index, "time": snap.time, "vehicles": snap.W,
            "comm_links": len(snap.comm_edges), "established_links": len(est),
            "established": sorted(f"{e.source}->{e.target}" for e in est),
            "mean_tst": (sum(e.tst for e in est) / len(est)) if est else None}


@dataclass
class Simulation:
    cfg: ScenarioConfig
    timeline: SegTimeline = field(default_factory=SegTimeline)
    outcomes: list[QueryOutcome] = field(default_factory=list)

    def __post_init__(self):
        cfg = self.cfg
        self.nodes: dict[str, VehicleNode] = {
            v.id: VehicleNode(v.id, InterestProfile(v.profile), v.psi_h) for v in cfg.vehicles}
        schedule = [Arrival(v.entry_time, v.id, v.lane, v.speed, v.x) for v in cfg.vehicles]
        if cfg.arrivals is not None:
            schedule += self._poisson_schedule()
        self.traffic = Traffic(cfg.highway, schedule)
        self._positions: dict[str, VehicleState] = {}
        self.net = Network([], self._in_range, hop_latency=cfg.sim.hop_latency,
                           payload_to_json=_payload_json)
        self.rng = random.Random(cfg.sim.seed)
        self._keypair = None

    def _poisson_schedule(self) -> list[Arrival]:
        p = self.cfg.arrivals
        rng = random.Random(p.seed)
        arrivals = poisson_arrivals(p.rate, self.cfg.sim.duration, self.cfg.highway, rng,
                                    (p.speed_min, p.speed_max))
        for a in arrivals:
            bits = tuple(int(rng.random() < p.profile_density) for _ in range(self.cfg.w))
            self.nodes[a.id] = VehicleNode(a.id, InterestProfile(bits), self.cfg.thresholds.psi_h)
        return arrivals

    @property
    def keypair(self):
        if self._keypair is None:
            self._keypair = paillier.generate_keypair(self.cfg.crypto.key_bits, self.cfg.crypto.seed)
        return self._keypair

    def _in_range(self, a: str, b: str) -> bool:
        sa, sb = self._positions.get(a), self._positions.get(b)
        if sa is None or sb is None:
            return False
        return math.hypot(sa.x - sb.x, sa.y - sb.y) <= self.cfg.highway.h

    def _beacon(self, t: float) -> list[VehicleState]:
        """Every vehicle broadcasts a BSM; the SEG is rebuilt from the beacons."""
        states = self.traffic.states
        self._positions = {s.id: s for s in states}
        self.net.nodes = set(self._positions)
        self.net.now = t
        records = broadcast_bsms(states, {v: self.nodes[v].profile.bits for v in self._positions},
                                 {v: self.nodes[v].psi_h for v in self._positions}, t)
        for rec in records:
            for other in sorted(self._positions):
                if other != rec.sender and self._in_range(rec.sender, other):
                    self.net.send(rec.sender, other, "bsm", rec)
        self.net.run_until_idle()
        return [VehicleState(r.sender, r.x, r.y, r.v, self._positions[r.sender].lane) for r in records]

    def _build(self, t: float) -> SegSnapshot:
        states = self._beacon(t)
        cfg = self.cfg
        snap = build_snapshot(states, self.nodes, self.timeline.latest(), t, cfg.thresholds,
                              cfg.weights, cfg.highway.h, basis=cfg.sim.centrality_basis)
        self.timeline.append(snap)
        return snap

    def query(self, s: str, d: str, snap: SegSnapshot, query_id: str) -> IndirectTrustResult:
        for v in (s, d):
            if v not in snap.nodes:
                raise VehicleAbsentError(f"vehicle {v!r} is not on the road at t={snap.time}")
        if s == d:
            raise DegenerateQueryError("source and destination coincide")
        self.net.now = snap.time + self.cfg.sim.hop_latency  # after this step's beacons
        return initiate(s, d, snap, self.cfg.weights, self.keypair, self.net,
                        psi_l=self.cfg.thresholds.psi_l, rng=self.rng, z_max=self.cfg.sim.z_max,
                        scale=self.cfg.fixed_point_scale, query_id=query_id)

    def run(self, until: float | None = None, run_queries: bool = True) -> SegTimeline:
        cfg = self.cfg
        end = cfg.sim.duration if until is None else until
        pending = sorted(enumerate(cfg.queries), key=lambda q: (q[1].at, q[0]))
        while True:
            t = self.traffic.time
            snap = self._build(t)
            if run_queries:
                while pending and pending[0][1].at <= t + 1e-9:
                    i, q = pending.pop(0)
                    self._run_query(f"q{i}", q.s, q.d, q.at, snap)
            if t + cfg.highway.dt > end + 1e-9:
                break
            self.traffic.advance()
        return self.timeline

    def _run_query(self, qid, s, d, at, snap) -> None:
        outcome = QueryOutcome(qid, s, d, at)
        try:
            outcome.result = self.query(s, d, snap, qid)
        except (UnreachableTargetError, VehicleAbsentError, UnknownVehicleError) as exc:
            outcome.error = str(exc)
        self.outcomes.append(outcome)

    def snapshot_at(self, t: float) -> SegSnapshot:
        """Simulate up to ``t`` (no scheduled queries) and return that snapshot."""
        self.run(until=t, run_queries=False)
        return [s for s in self.timeline if s.time <= t + 1e-9][-1]

    # outputs -----------------------------------------------------------------

    def modelled_decrypt_ms(self, result: IndirectTrustResult) -> float:
        # one exponentiation mod n^2 per route aggregate
        return round(len(result.op_f) * self.cfg.sim.t_exp_ms, 6)

    def metrics_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(METRICS_COLUMNS)
        for o in self.outcomes:
            r = o.result
            if r is None:
                writer.writerow([o.query_id, o.s, o.d, 0, 0, "", ""])
                continue
            n_routes = len(r.op_f)
            writer.writerow([o.query_id, o.s, o.d, n_routes, r.messages_sent,
                             f"{self.modelled_decrypt_ms(r):.3f}", f"{r.tst_sd:.6f}"])
        return buf.getvalue()

    def report(self, exp_timing: dict | None = None) -> dict:
        return {
            "scenario": self.cfg.name,
            "steps": [step_summary(s) for s in self.timeline],
            "queries": [o.to_dict() for o in self.outcomes],
            "net": self.net.metrics.to_dict(),
            "timing": exp_timing or {},
        }

    def write_outputs(self, out_dir: Path) -> dict:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "metrics.csv").write_text(self.metrics_csv())
        (out_dir / "trace.jsonl").write_text("".join(line + "\n" for line in self.net.trace_lines()))
        (out_dir / "snapshots.json").write_text(
            json.dumps([s.to_dict() for s in self.timeline], indent=1))
        report = self.report(exp_timing=measure_exponentiation(self.keypair[0]))
        (out_dir / "report.json").write_text(json.dumps(report, indent=2))
        return report


def _payload_json(payload) -> dict:
    if hasattr(payload, "to_json"):
        return payload.to_json()
    if hasattr(payload, "sender") and hasattr(payload, "profile"):
        return {"x": payload.x, "y": payload.y, "v": payload.v}
    return {}


def measure_exponentiation(pk: paillier.PaillierPublicKey, trials: int = 20) -> dict:
    """Wall-clock cost of one ``r^n mod n^2``, the dominant encryption exponentiation."""
    rng = random.Random(0)
    samples = []
    for _ in range(trials):
        r = paillier.random_unit(pk.n, rng)
        t0 = time.perf_counter()
        pow(r, pk.n, pk.n_squared)
        samples.append((time.perf_counter() - t0) * 1e3)
    return {"key_bits": pk.n.bit_length(), "t_exp_ms_mean": sum(samples) / len(samples),
            "reference_t_exp_ms": 1.1}

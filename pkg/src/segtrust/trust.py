"""Indirect trust through encrypted opinion aggregation.

The initiator ``s`` finds routes to ``d`` with SEG-Dijkstra and sends one
request per route to the route node adjacent to ``d``.  The request then walks
back toward ``s``; every intermediate node encrypts its weighted opinion of
its d-ward successor under ``s``'s public key and multiplies it into the
accumulator.  Only ``s`` holds the private key, so no node sees the opinions
already collected.
"""
from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field, replace
from typing import Sequence

from . import paillier
from .paillier import Ciphertext, PaillierPrivateKey, PaillierPublicKey
from .routing import DEFAULT_Z_MAX, RouteSet, seg_dijkstra
from .seg import SegSnapshot, TrustWeights, clamp_trust, degree_centrality, homophily
from .simnet import Network

log = logging.getLogger(__name__)

REQUEST = "opinion_request"
REPLY = "opinion_reply"


class ProtocolError(RuntimeError):
    pass


class UnreachableTargetError(ProtocolError):
    pass


class NoOpinionError(ProtocolError):
    pass


def hop_weight(h: int, gamma: float = 0.8) -> float:
    """Opinion weight of the node ``h`` hops away from the initiator."""
    if h < 1:
        raise ValueError("hop index starts at 1")
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    return gamma ** (h - 1)


@dataclass(frozen=True)
class OpinionRequest:
    query_id: str
    initiator: str
    target: str
    route: tuple[str, ...]  # s, v_1 ... v_k, d
    hop_weights: tuple[float, ...]  # weight of v_1 ... v_k
    accumulator: Ciphertext
    pk: PaillierPublicKey
    cursor: int
    nonce: str
    scale: int = paillier.DEFAULT_SCALE
    flagged: bool = False

    @property
    def contributors(self) -> int:
        return len(self.route) - 2

    def to_json(self) -> dict:
        return {"route": list(self.route), "cursor": self.cursor,
                "accumulator": self.accumulator.hex(), "nonce": self.nonce,
                "flagged": self.flagged}


@dataclass(frozen=True)
class OpinionContribution:
    contributor: str
    op_v: float
    raw: int  # signed fixed-point encoding


@dataclass(frozen=True)
class IndirectTrustResult:
    source: str
    target: str
    tst_sd: float
    op_f: tuple[float, ...]  # decoded aggregate opinion per route
    contributors: tuple[int, ...]
    routes_used: RouteSet | None
    messages_sent: int
    c_d: float
    shp: float
    weights: TrustWeights
    direct: bool = False
    flagged_routes: tuple[int, ...] = ()
    decrypt_ms: tuple[float, ...] = field(default=(), compare=False)

    def recompute(self) -> float:
        if self.direct:
            return self.tst_sd
        return indirect_trust(self.c_d, self.shp, self.op_f, self.contributors, self.weights)


def new_request(query_id: str, route: Sequence[str], pk: PaillierPublicKey, gamma: float,
                rng: random.Random, scale: int = paillier.DEFAULT_SCALE,
                nonce: str | None = None) -> OpinionRequest:
    """Request as dispatched by the initiator: accumulator holds ``E(0)``."""
    route = tuple(route)
    if len(route) < 3:
        raise ProtocolError("route has no intermediate node to ask")
    weights = tuple(hop_weight(h, gamma) for h in range(1, len(route) - 1))
    nonce = nonce or f"{query_id}:{rng.getrandbits(48):012x}"
    return OpinionRequest(query_id=query_id, initiator=route[0], target=route[-1], route=route,
                          hop_weights=weights, accumulator=paillier.encrypt(pk, 0, rng=rng),
                          pk=pk, cursor=len(route) - 2, nonce=nonce, scale=scale)


def formulate_opinion(node: str, req: OpinionRequest, snapshot: SegSnapshot) -> tuple[OpinionContribution, bool]:
    """Weighted opinion of ``node`` about its d-ward successor.

    Returns the contribution and whether the successor link was missing (in
    which case the opinion is 0).
    """
    succ = req.route[req.cursor + 1]
    edge = snapshot.edge(node, succ)
    missing = edge is None or not edge.established
    tst = 0.0 if missing else edge.tst
    op_v = req.hop_weights[req.cursor - 1] * tst
    return OpinionContribution(node, op_v, paillier.encode_signed(op_v, req.scale, req.pk.n)), missing


def handle_request(node: str, req: OpinionRequest, snapshot: SegSnapshot,
                   rng: random.Random | None = None) -> OpinionRequest:
    """Fold ``node``'s encrypted opinion into the accumulator and step back one hop."""
    if req.cursor <= 0:
        raise ProtocolError("request already back at the initiator")
    if req.route[req.cursor] != node:
        raise ProtocolError(f"{node} is not the current holder ({req.route[req.cursor]})")
    contribution, missing = formulate_opinion(node, req, snapshot)
    if missing:
        log.warning("%s lost its link toward %s; contributing 0", node, req.route[req.cursor + 1])
    enc = paillier.encrypt(req.pk, contribution.raw, rng=rng)
    return replace(req, accumulator=paillier.hom_add(req.pk, req.accumulator, enc),
                   cursor=req.cursor - 1, flagged=req.flagged or missing)


def indirect_trust(c_d: float, shp: float, op_f: Sequence[float], contributors: Sequence[int],
                   w: TrustWeights) -> float:
    """Centrality-homophily term plus the weighted mean opinion over routes."""
    means = [op / k for op, k in zip(op_f, contributors) if k > 0]
    if not means:
        raise NoOpinionError("no route carried any opinion")
    opinion = sum(means) / len(means)
    return clamp_trust((w.delta_d * c_d) * (w.delta_h * shp) + w.delta_f * opinion)


def finalize(s: str, d: str, per_route_op_f: Sequence[float], route_lengths: Sequence[int],
             snapshot: SegSnapshot, weights: TrustWeights) -> float:
    c_d = degree_centrality(snapshot, d)
    shp = homophily(snapshot.nodes[s].profile, snapshot.nodes[d].profile)
    return indirect_trust(c_d, shp, per_route_op_f, route_lengths, weights)


def route_message_count(routes: Sequence[Sequence[str]]) -> int:
    """One source-routed request plus one backward message per contributor, per route."""
    return sum(len(r) - 1 for r in routes)


class _Session:
    def __init__(self, snapshot: SegSnapshot, initiator: str, base_seed: int):
        self.snapshot = snapshot
        self.initiator = initiator
        self.base_seed = base_seed
        self.replies: dict[str, OpinionRequest] = {}
        self.seen: set[tuple[str, str]] = set()

    def on_message(self, env, net: Network) -> None:
        req = env.payload
        if not isinstance(req, OpinionRequest):
            return
        node = env.dst
        if (node, req.nonce) in self.seen:
            log.info("replayed request %s at %s dropped", req.nonce, node)
            return
        self.seen.add((node, req.nonce))
        if node == self.initiator:
            if req.cursor != 0:
                raise ProtocolError("reply reached the initiator early")
            self.replies[req.nonce] = req
            return
        rng = random.Random(f"{self.base_seed}:{node}:{req.nonce}")
        out = handle_request(node, req, self.snapshot, rng)
        net.send(node, out.route[out.cursor], REPLY, out, query_id=out.query_id)


def make_network(snapshot: SegSnapshot, start_time: float | None = None, **kw) -> Network:
    return Network(sorted(snapshot.nodes), snapshot.in_comm_range,
                   start_time=snapshot.time if start_time is None else start_time,
                   payload_to_json=lambda p: p.to_json() if hasattr(p, "to_json") else {}, **kw)


def initiate(s: str, d: str, snapshot: SegSnapshot, weights: TrustWeights,
             keypair: tuple[PaillierPublicKey, PaillierPrivateKey], net: Network | None = None,
             *, psi_l: float, rng: random.Random, z_max: int = DEFAULT_Z_MAX,
             scale: int = paillier.DEFAULT_SCALE, query_id: str = "q0") -> IndirectTrustResult:
    """Run one indirect-trust query from ``s`` about ``d`` on ``snapshot``."""
    pk, sk = keypair
    c_d = degree_centrality(snapshot, d) if s != d else 0.0
    shp = homophily(snapshot.nodes[s].profile, snapshot.nodes[d].profile)
    direct = snapshot.edge(s, d)
    if direct is not None and direct.established:
        return IndirectTrustResult(source=s, target=d, tst_sd=direct.tst, op_f=(), contributors=(),
                                   routes_used=None, messages_sent=0, c_d=c_d, shp=shp,
                                   weights=weights, direct=True)

    route_set = seg_dijkstra(snapshot, s, d, psi_l, z_max=z_max)
    routes = [r for r in route_set.routes if len(r) > 2]
    if not routes:
        raise UnreachableTargetError(f"no trusted route from {s} to {d}")

    net = net or make_network(snapshot)
    session = _Session(snapshot, s, rng.getrandbits(64))
    participants = sorted({v for r in routes for v in r})
    for v in participants:
        net.register(v, session.on_message)
    before = net.metrics.per_query_messages[query_id]

    nonces = []
    try:
        for i, route in enumerate(routes):
            req = new_request(query_id, route, pk, weights.gamma, rng, scale,
                              nonce=f"{query_id}/{i}:{rng.getrandbits(48):012x}")
            nonces.append(req.nonce)
            net.send(s, route[-2], REQUEST, req, query_id=query_id, via=route[1:-2])
        net.run_until_idle()
    finally:
        for v in participants:
            net.unregister(v)

    op_f, contributors, flagged, timings = [], [], [], []
    for i, (route, nonce) in enumerate(zip(routes, nonces)):
        reply = session.replies.get(nonce)
        if reply is None:
            raise ProtocolError(f"route {i} ({'-'.join(route)}) returned no reply")
        t0 = time.perf_counter()
        try:
            raw = paillier.decrypt(sk, pk, reply.accumulator)
        except paillier.PaillierError as exc:
            raise ProtocolError(f"cannot decrypt aggregate of route {i}") from exc
        timings.append((time.perf_counter() - t0) * 1e3)
        op_f.append(paillier.decode_signed(raw, scale, pk.n))
        contributors.append(reply.contributors)
        if reply.flagged:
            flagged.append(i)

    tst = indirect_trust(c_d, shp, op_f, contributors, weights)
    return IndirectTrustResult(
        source=s, target=d, tst_sd=tst, op_f=tuple(op_f), contributors=tuple(contributors),
        routes_used=route_set, messages_sent=net.metrics.per_query_messages[query_id] - before,
        c_d=c_d, shp=shp, weights=weights, flagged_routes=tuple(flagged),
        decrypt_ms=tuple(timings))

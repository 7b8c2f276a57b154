"""Deterministic discrete-event message passing with per-message accounting.

Delivery is reliable between vehicles in communication range at send time.
Events are processed in ``(deliver_time, sequence)`` order, so two runs of the
same scenario produce identical traces.
"""
from __future__ import annotations

import heapq
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

log = logging.getLogger(__name__)

DEFAULT_HOP_LATENCY = 0.010


@dataclass(frozen=True)
class Envelope:
    src: str
    dst: str
    kind: str
    payload: Any
    send_time: float = 0.0
    deliver_time: float = 0.0
    query_id: str | None = None
    # source-routed messages travel over these intermediate relays without being
    # processed there; every hop must be in range
    via: tuple[str, ...] = ()


@dataclass
class NetMetrics:
    total_messages: int = 0
    delivered: int = 0
    dropped: int = 0
    relay_hops: int = 0
    messages_by_type: Counter = field(default_factory=Counter)
    per_query_messages: Counter = field(default_factory=Counter)
    drop_reasons: Counter = field(default_factory=Counter)

    def to_dict(self) -> dict:
        return {
            "total_messages": self.total_messages,
            "delivered": self.delivered,
            "dropped": self.dropped,
            "relay_hops": self.relay_hops,
            "messages_by_type": dict(sorted(self.messages_by_type.items())),
            "per_query_messages": dict(sorted(self.per_query_messages.items())),
            "drop_reasons": dict(sorted(self.drop_reasons.items())),
        }


class SimulationAborted(RuntimeError):
    def __init__(self, message: str, metrics: NetMetrics):
        super().__init__(message)
        self.metrics = metrics


Handler = Callable[[Envelope, "Network"], None]


class Network:
    """Event queue plus range oracle.

    ``in_range(a, b)`` decides deliverability; ``payload_to_json`` renders a
    payload for the trace log.
    """

    def __init__(self, nodes: Sequence[str], in_range: Callable[[str, str], bool],
                 hop_latency: float = DEFAULT_HOP_LATENCY, start_time: float = 0.0,
                 payload_to_json: Callable[[Any], dict] | None = None):
        self.nodes = set(nodes)
        self.in_range = in_range
        self.hop_latency = hop_latency
        self.now = start_time
        self.metrics = NetMetrics()
        self.trace: list[dict] = []
        self._handlers: dict[str, Handler] = {}
        self._queue: list[tuple[float, int, Envelope]] = []
        self._seq = 0
        self._payload_to_json = payload_to_json or (lambda p: {})

    def register(self, node: str, handler: Handler) -> None:
        self._handlers[node] = handler

    def _record(self, env: Envelope, event: str, reason: str | None = None) -> None:
        rec = {"event": event, "type": env.kind, "from": env.src, "to": env.dst,
               "sim_time": round(self.now, 9), "send_time": round(env.send_time, 9),
               "deliver_time": round(env.deliver_time, 9)}
        if env.query_id is not None:
            rec["query_id"] = env.query_id
        if env.via:
            rec["via"] = list(env.via)
        if reason:
            rec["reason"] = reason
        rec.update(self._payload_to_json(env.payload))
        self.trace.append(rec)

    def _drop(self, env: Envelope, reason: str) -> bool:
        self.metrics.dropped += 1
        self.metrics.drop_reasons[reason] += 1
        self._record(env, "drop", reason)
        log.debug("dropped %s %s->%s: %s", env.kind, env.src, env.dst, reason)
        return False

    def send(self, src: str, dst: str, kind: str, payload: Any, query_id: str | None = None,
             via: Sequence[str] = ()) -> bool:
        """Queue a message; returns False (and counts a drop) if it cannot be delivered."""
        hops = [src, *via, dst]
        env = Envelope(src=src, dst=dst, kind=kind, payload=payload, send_time=self.now,
                       deliver_time=round(self.now + self.hop_latency * (len(hops) - 1), 9),
                       query_id=query_id, via=tuple(via))
        self.metrics.total_messages += 1
        self.metrics.messages_by_type[kind] += 1
        if query_id is not None:
            self.metrics.per_query_messages[query_id] += 1
        if src not in self.nodes:
            return self._drop(env, "unknown sender")
        if dst not in self.nodes or any(v not in self.nodes for v in via):
            return self._drop(env, "unknown receiver")
        for a, b in zip(hops, hops[1:]):
            if not self.in_range(a, b):
                return self._drop(env, f"out of range {a}-{b}")
        self.metrics.relay_hops += len(via)
        self._record(env, "send")
        heapq.heappush(self._queue, (env.deliver_time, self._seq, env))
        self._seq += 1
        return True

    def unregister(self, node: str) -> None:
        self._handlers.pop(node, None)

    def pending(self) -> int:
        return len(self._queue)

    def run_until_idle(self) -> NetMetrics:
        while self._queue:
            t, _, env = heapq.heappop(self._queue)
            self.now = t
            self.metrics.delivered += 1
            self._record(env, "deliver")
            handler = self._handlers.get(env.dst)
            if handler is None:
                continue
            try:
                handler(env, self)
            except Exception as exc:
                raise SimulationAborted(f"handler at {env.dst} failed: {exc}", self.metrics) from exc
        return self.metrics

    def trace_lines(self) -> list[str]:
        return [json.dumps(rec, sort_keys=True) for rec in self.trace]

"""Seeded random inputs for benchmarks and property checks."""
from __future__ import annotations

import random

from .mobility import HighwayConfig, VehicleState
from .seg import (UNBOUNDED, InterestProfile, SegSnapshot, SocialEdge, VehicleNode)


def random_profile(w: int, rng: random.Random, density: float = 0.5) -> InterestProfile:
    return InterestProfile(tuple(int(rng.random() < density) for _ in range(w)))


def random_vehicles(n: int, rng: random.Random, cfg: HighwayConfig, w: int = 6,
                    span: float = 800.0, psi_h_range: tuple[float, float] = (0.3, 0.7),
                    ) -> tuple[list[VehicleState], dict[str, VehicleNode]]:
    """``n`` vehicles on a stretch of ``span`` metres, both directions of travel."""
    states, nodes = [], {}
    half = max(1, cfg.lanes // 2)
    for i in range(n):
        vid = f"v{i:03d}"
        lane = rng.randrange(cfg.lanes)
        speed = rng.uniform(15.0, 35.0) * (1 if lane < half else -1)
        if rng.random() < 0.1:
            speed = 25.0 if speed > 0 else -25.0  # some exact ties -> unbounded durations
        states.append(VehicleState(vid, rng.uniform(0.0, span), cfg.lane_y(lane), speed, lane))
        nodes[vid] = VehicleNode(vid, random_profile(w, rng), round(rng.uniform(*psi_h_range), 2))
    return states, nodes


def random_social_graph(n: int, rng: random.Random, mean_degree: float = 4.0,
                        et_range: tuple[float, float] = (5.0, 120.0), p_unbounded: float = 0.05,
                        tst_range: tuple[float, float] = (0.5, 1.0), w: int = 8,
                        ) -> SegSnapshot:
    """Connected sparse snapshot with ``mean_degree`` social links per vehicle on average.

    A random spanning tree guarantees connectivity; the remaining undirected
    links are drawn uniformly.  Every link is established in both directions
    with independent trust values and a shared expected duration.
    """
    ids = [f"n{i:05d}" for i in range(n)]
    target = min(n * (n - 1) // 2, max(n - 1, int(round(n * mean_degree / 2))))
    pairs: set[tuple[str, str]] = set()
    for i in range(1, n):
        j = rng.randrange(i)
        pairs.add((ids[j], ids[i]))
    while len(pairs) < target:
        a, b = rng.sample(ids, 2)
        pairs.add((a, b) if a < b else (b, a))
    edges = {}
    for a, b in sorted(pairs):
        et = UNBOUNDED if rng.random() < p_unbounded else round(rng.uniform(*et_range), 3)
        for x, y in ((a, b), (b, a)):
            edges[(x, y)] = SocialEdge(x, y, 0.0, et, 1.0, round(rng.uniform(*tst_range), 4), True)
    nodes = {v: VehicleNode(v, random_profile(w, rng), 0.5) for v in ids}
    return SegSnapshot(index=0, time=0.0, nodes=nodes, comm_edges=frozenset(pairs),
                       social_edges=edges)

"""Timing and operation-count benchmarks."""
from __future__ import annotations

import csv
import io
import math
import random
import statistics
import time

from . import paillier
from .generators import random_social_graph
from .routing import filtered_adjacency, traverse


def _p95(xs: list[float]) -> float:
    xs = sorted(xs)
    return xs[min(len(xs) - 1, math.ceil(0.95 * len(xs)) - 1)]


def _timed(fn, trials: int) -> list[float]:
    out = []
    for _ in range(trials):
        t0 = time.perf_counter()
        fn()
        out.append((time.perf_counter() - t0) * 1e3)
    return out


def crypto_bench(key_bits=(512, 1024, 2048), trials: int = 50, seed: int = 0) -> list[dict]:
    rows = []
    for bits in key_bits:
        pk, sk = paillier.generate_keypair(bits, seed)
        rng = random.Random(seed)
        m = [rng.randrange(pk.n) for _ in range(trials)]
        cts = [paillier.encrypt(pk, x, rng=rng) for x in m]
        it = iter(range(10 ** 9))

        def enc():
            paillier.encrypt(pk, m[next(it) % trials], rng=rng)

        def dec():
            paillier.decrypt(sk, pk, cts[next(it) % trials])

        def add():
            i = next(it)
            paillier.hom_add(pk, cts[i % trials], cts[(i + 1) % trials])

        def exp():
            pow(cts[next(it) % trials].value, pk.n, pk.n_squared)

        for op, fn in (("encrypt", enc), ("decrypt", dec), ("hom_add", add), ("exponentiation", exp)):
            samples = _timed(fn, trials)
            rows.append({"op": op, "key_bits": bits, "trials": trials,
                         "mean_ms": round(statistics.fmean(samples), 4),
                         "p95_ms": round(_p95(samples), 4)})
    return rows


def dijkstra_bench(sizes=(100, 1000, 10000), seed: int = 0, mean_degree: float = 4.0,
                   psi_l: float = 12.0) -> list[dict]:
    """Full traversals over nested random graphs; each size is a superset-seeded draw."""
    rows = []
    for n in sizes:
        snap = random_social_graph(n, random.Random(seed), mean_degree=mean_degree)
        adj = filtered_adjacency(snap, psi_l)
        t0 = time.perf_counter()
        _, stats = traverse(adj, min(snap.nodes))
        wall = (time.perf_counter() - t0) * 1e3
        e = stats.edges
        bound = (e + n) * math.log(n)
        rows.append({"vertices": n, "edges": e, "extractions": stats.extractions,
                     "relaxations": stats.relaxations, "pushes": stats.pushes,
                     "comparisons": stats.comparisons, "operations": stats.operations,
                     "wall_ms": round(wall, 3), "ratio": round(stats.operations / bound, 6)})
    return rows


def to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()

from __future__ import annotations

import random

import pytest

from segtrust import paillier
from segtrust.mobility import VehicleState
from segtrust.seg import UNBOUNDED, InterestProfile, SegSnapshot, SocialEdge, VehicleNode

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def toy_keys():
    return paillier.keypair_from_primes(5, 7)


@pytest.fixture(scope="session")
def keys64():
    return paillier.generate_keypair(64, 5)


@pytest.fixture(scope="session")
def keys512():
    return paillier.generate_keypair(512, 42)


def make_snapshot(links, nodes=None, time=0.0, profiles=None):
    """Hand-built snapshot: ``links`` maps (a, b) -> (et, tst) for established a->b links."""
    ids = set(nodes or ())
    for a, b in links:
        ids |= {a, b}
    profiles = profiles or {}
    node_map = {v: VehicleNode(v, InterestProfile(profiles.get(v, (1, 0, 1, 0)))) for v in ids}
    edges = {(a, b): SocialEdge(a, b, time, et, 1.0, tst, True) for (a, b), (et, tst) in links.items()}
    comm = frozenset((a, b) if a < b else (b, a) for a, b in links)
    return SegSnapshot(index=0, time=time, nodes=node_map, comm_edges=comm, social_edges=edges)


def both_ways(pairs, et=UNBOUNDED, tst=0.7):
    out = {}
    for a, b in pairs:
        out[(a, b)] = (et, tst)
        out[(b, a)] = (et, tst)
    return out


def rng(seed=0):
    return random.Random(seed)


def state(vid, x, v, y=0.0, lane=0):
    return VehicleState(vid, x, y, v, lane)

"""SEG-Dijkstra: longest-expected-duration-first traversal and route extraction."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .seg import UNBOUNDED, Duration, SegSnapshot

DEFAULT_Z_MAX = 4
DEFAULT_MAX_PREDS = 4


class DegenerateQueryError(ValueError):
    pass


class UnknownVehicleError(LookupError):
    pass


@dataclass
class DijkstraStats:
    extractions: int = 0
    relaxations: int = 0
    pushes: int = 0
    comparisons: int = 0
    vertices: int = 0
    edges: int = 0

    @property
    def operations(self) -> int:
        return self.extractions + self.relaxations + self.pushes + self.comparisons


@dataclass(frozen=True)
class RouteSet:
    source: str
    target: str
    routes: tuple[tuple[str, ...], ...]
    predecessors: dict = field(default_factory=dict, compare=False)
    stats: DijkstraStats = field(default_factory=DijkstraStats, compare=False)

    def __len__(self):
        return len(self.routes)

    def __iter__(self):
        return iter(self.routes)

    def __bool__(self):
        return bool(self.routes)


class _Entry:
    """Heap entry ordered by longest ET first, then ascending node id."""

    __slots__ = ("key", "node", "stats")

    def __init__(self, et: Duration, node: str, stats: DijkstraStats):
        # unbounded sorts before any finite duration
        self.key = (0, 0.0, node) if et is UNBOUNDED else (1, -et, node)
        self.node = node
        self.stats = stats

    def __lt__(self, other: "_Entry") -> bool:
        self.stats.comparisons += 1
        return self.key < other.key


def filtered_adjacency(snapshot: SegSnapshot, psi_l: float) -> dict[str, list[tuple[str, Duration]]]:
    """Established social links with ``ET >= psi_l``, as sorted successor lists."""
    adj: dict[str, list[tuple[str, Duration]]] = {v: [] for v in snapshot.nodes}
    for (a, b), e in snapshot.social_edges.items():
        if e.established and not e.et < psi_l:
            adj[a].append((b, e.et))
    for v in adj:
        adj[v].sort()
    return adj


def traverse(adj: dict[str, list[tuple[str, Duration]]], s: str,
             max_preds: int = DEFAULT_MAX_PREDS) -> tuple[dict[str, list[str]], DijkstraStats]:
    """Visit every node reachable from ``s``, longest link duration first.

    Each open neighbour of the node being closed records it as a predecessor
    (at most ``max_preds`` per node), so the predecessor lists form a DAG in
    closing order.
    """
    stats = DijkstraStats(vertices=len(adj), edges=sum(len(v) for v in adj.values()))
    preds: dict[str, list[str]] = {s: []}
    closed: set[str] = set()
    queue = [_Entry(UNBOUNDED, s, stats)]
    stats.pushes += 1
    while queue:
        entry = heapq.heappop(queue)
        stats.extractions += 1
        x = entry.node
        if x in closed:
            continue
        closed.add(x)
        for y, et in adj[x]:
            stats.relaxations += 1
            if y in closed:
                continue
            plist = preds.setdefault(y, [])
            if len(plist) < max_preds and x not in plist:
                plist.append(x)
            heapq.heappush(queue, _Entry(et, y, stats))
            stats.pushes += 1
    return preds, stats


def extract_routes(preds: dict[str, list[str]], s: str, d: str,
                   z_max: int = DEFAULT_Z_MAX) -> list[tuple[str, ...]]:
    """Backtrack from ``d`` to ``s`` through predecessor lists, up to ``z_max`` paths."""
    if d not in preds:
        return []
    routes: list[tuple[str, ...]] = []
    stack = [(d, (d,))]
    while stack and len(routes) < z_max:
        node, suffix = stack.pop()
        if node == s:
            routes.append(suffix)
            continue
        # reversed so that the first-recorded predecessor is explored first
        for p in reversed(preds.get(node, [])):
            if p not in suffix:
                stack.append((p, (p,) + suffix))
    return routes


def seg_dijkstra(snapshot: SegSnapshot, s: str, d: str, psi_l: float,
                 z_max: int = DEFAULT_Z_MAX, max_preds: int = DEFAULT_MAX_PREDS) -> RouteSet:
    if s == d:
        raise DegenerateQueryError("source and destination coincide")
    for v in (s, d):
        if v not in snapshot.nodes:
            raise UnknownVehicleError(v)
    adj = filtered_adjacency(snapshot, psi_l)
    preds, stats = traverse(adj, s, max_preds)
    routes = extract_routes(preds, s, d, z_max)
    return RouteSet(source=s, target=d, routes=tuple(routes), predecessors=preds, stats=stats)


def operation_counter(run: RouteSet) -> DijkstraStats:
    return run.stats

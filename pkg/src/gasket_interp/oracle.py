"""Level-m graph approximation of S_n and BFS shortest-path counting.

Between two level-m vertices every geodesic is a union of level-m cell edges,
so the graph with all edges of length 2^-m gives exact distances and exact
geodesic counts for vertex pairs.  This module is the independent check on
:mod:`gasket_interp.metric`.
"""

from __future__ import annotations

import itertools
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .core import BaryCoord, PointAddress, bary_to_address
from .errors import BudgetExceeded
from . import metric

DEFAULT_BUDGET = 2_000_000  # maximum number of level-m cells


@dataclass(frozen=True)
class LevelGraph:
    n: int
    m: int
    vertices: tuple  # integer coordinates scaled by 2**m
    adjacency: tuple  # tuple of sorted neighbour tuples
    n_edges: int

    def bary(self, v: int) -> BaryCoord:
        den = 1 << self.m
        return BaryCoord(tuple(Fraction(c, den) for c in self.vertices[v]))

    def address(self, v: int) -> PointAddress:
        return bary_to_address(self.bary(v))[0]

    def index_of(self, p: BaryCoord | PointAddress) -> int:
        from .core import as_bary

        den = 1 << self.m
        c = as_bary(p)
        key = tuple(int(x * den) for x in c.coords)
        return self._index()[key]

    def _index(self) -> dict:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {v: i for i, v in enumerate(self.vertices)}
            object.__setattr__(self, "_idx", idx)
        return idx


def expected_vertex_count(n: int, m: int) -> int:
    # corners plus one new vertex per edge of each level-(m-1) cell
    return (n + 1) + (n * (n + 1) // 2) * ((n + 1) ** m - 1) // n


def build_graph(n: int, m: int, budget: int = DEFAULT_BUDGET) -> LevelGraph:
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    if (n + 1) ** m > budget:
        raise BudgetExceeded(f"(n+1)^m = {(n + 1) ** m} cells exceeds budget {budget}")
    side = 1 << m
    index: dict[tuple, int] = {}
    vertices: list[tuple] = []
    edges: set[tuple[int, int]] = set()
    for word in itertools.product(range(n + 1), repeat=m):
        # corner i of cell <word> has coordinates sum 2^(m-j) [w_j] + e_i
        base = [0] * (n + 1)
        for j, a in enumerate(word, start=1):
            base[a] += 1 << (m - j)
        ids = []
        for i in range(n + 1):
            key = list(base)
            key[i] += 1
            key = tuple(key)
            v = index.get(key)
            if v is None:
                v = index[key] = len(vertices)
                vertices.append(key)
            ids.append(v)
        for a, b in itertools.combinations(ids, 2):
            edges.add((a, b) if a < b else (b, a))
    assert all(sum(v) == side for v in vertices)
    adj = [[] for _ in vertices]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    g = LevelGraph(n, m, tuple(vertices), tuple(tuple(sorted(a)) for a in adj), len(edges))
    object.__setattr__(g, "_idx", index)
    return g


def bfs_counts(g: LevelGraph, source: int) -> tuple[list[int], list[int]]:
    """Hop distance and number of shortest paths from ``source`` to every vertex."""
    dist = [-1] * len(g.vertices)
    count = [0] * len(g.vertices)
    dist[source] = 0
    count[source] = 1
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
            if dist[v] == dist[u] + 1:
                count[v] += count[u]
    return dist, count


def bfs_distance_and_count(g: LevelGraph, u: int, v: int) -> tuple[Fraction, int]:
    dist, count = bfs_counts(g, u)
    return Fraction(dist[v], 1 << g.m), count[v]


@dataclass
class VerifyReport:
    n: int
    m: int
    vertices: int
    pairs: int = 0
    distance_mismatches: list = field(default_factory=list)
    count_mismatches: list = field(default_factory=list)
    max_count: int = 0
    max_pair: tuple | None = None
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.distance_mismatches and not self.count_mismatches

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "vertices": self.vertices,
            "pairs": self.pairs,
            "distance_mismatches": self.distance_mismatches,
            "count_mismatches": self.count_mismatches,
            "max_geodesics": self.max_count,
            "attained_by": list(self.max_pair) if self.max_pair else None,
            "ok": self.ok,
            "seconds": round(self.seconds, 3),
        }


def verify_metric(n: int, m: int, counts: bool = True, budget: int = DEFAULT_BUDGET) -> VerifyReport:
    """Compare BFS distances (and counts) with the closed forms over all vertex pairs."""
    start = time.perf_counter()
    g = build_graph(n, m, budget)
    addrs = [g.address(v) for v in range(len(g.vertices))]
    rep = VerifyReport(n, m, len(g.vertices))
    den = 1 << m
    for u in range(len(addrs)):
        dist, cnt = bfs_counts(g, u)
        for v in range(u + 1, len(addrs)):
            rep.pairs += 1
            d_graph = Fraction(dist[v], den)
            d_metric = metric.distance(addrs[u], addrs[v])
            if d_graph != d_metric:
                rep.distance_mismatches.append([str(addrs[u]), str(addrs[v]), str(d_graph), str(d_metric)])
            if cnt[v] > rep.max_count:
                rep.max_count = cnt[v]
                rep.max_pair = (str(addrs[u]), str(addrs[v]))
            if counts:
                c_metric = metric.count_geodesics(addrs[u], addrs[v])
                if c_metric != cnt[v]:
                    rep.count_mismatches.append([str(addrs[u]), str(addrs[v]), cnt[v], c_metric])
    rep.seconds = time.perf_counter() - start
    return rep

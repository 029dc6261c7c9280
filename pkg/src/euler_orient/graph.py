"""Simple undirected graphs, generators and the edge-list text format.

Vertices are dense integers ``0..n-1``. Edges are stored as sorted
``(min, max)`` pairs in lexicographic order, so two graphs with the same
edge set compare (and serialize) identically.

Edge-list format::

    # optional comment lines
    n m
    u v
    ...
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from .errors import EdgeListError

__all__ = [
    "Graph",
    "parse_edge_list",
    "read_edge_list",
    "complete",
    "complete_bipartite",
    "cycle",
    "circulant",
    "path",
    "disjoint_union",
    "random_even_graph",
    "is_all_even",
    "degree_sequence",
    "connected_components",
    "is_connected",
]


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[int, ...] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        if n < 1:
            raise ValueError(f"vertex count must be positive, got {n}")
        seen: set[tuple[int, int]] = set()
        adj = [0] * n
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(sorted(seen)), tuple(adj))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        bits = self.adjacency[v]
        out = []
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return out

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u] >> v & 1)

    def remove_vertices(self, removed: Iterable[int]) -> Graph:
        """Induced subgraph on the remaining vertices, relabelled in increasing order."""
        gone = set(removed)
        keep = [v for v in range(self.n) if v not in gone]
        index = {v: i for i, v in enumerate(keep)}
        return Graph.from_edges(
            len(keep),
            ((index[u], index[v]) for u, v in self.edges if u in index and v in index),
        )

    def relabel(self, perm: list[int]) -> Graph:
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges))

    def to_edge_list(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListError(f"expected two integers, got {line!r}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(f"expected two integers, got {line!r}", lineno) from None
        if header is None:
            if a < 1 or b < 0:
                raise EdgeListError(f"bad header {line!r}", lineno)
            header = (a, b)
            continue
        n = header[0]
        if not (0 <= a < n and 0 <= b < n):
            raise EdgeListError(f"vertex out of range in {line!r} (n={n})", lineno)
        if a == b:
            raise EdgeListError(f"loop at vertex {a}", lineno)
        key = (min(a, b), max(a, b))
        if key in seen:
            raise EdgeListError(f"duplicate edge {key} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        edges.append(key)
    if header is None:
        raise EdgeListError("missing 'n m' header")
    if len(edges) != header[1]:
        raise EdgeListError(f"header announces {header[1]} edges, found {len(edges)}")
    return Graph.from_edges(header[0], edges)


def read_edge_list(path) -> Graph:
    with open(path, encoding="ascii") as fh:
        return parse_edge_list(fh.read())


# -- generators ---------------------------------------------------------------


def complete(n: int) -> Graph:
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def complete_bipartite(a: int, b: int) -> Graph:
    if a < 1 or b < 1:
        raise ValueError("both parts must be non-empty")
    return Graph.from_edges(a + b, ((u, a + v) for u in range(a) for v in range(b)))


def circulant(n: int, offsets: Iterable[int]) -> Graph:
    offsets = sorted(set(offsets))
    if n < 3:
        raise ValueError("circulant graphs need n >= 3")
    if not offsets or any(s < 1 or s > n // 2 for s in offsets):
        raise ValueError(f"offsets must lie in 1..{n // 2}")
    edges = {(min(j, (j + s) % n), max(j, (j + s) % n)) for j in range(n) for s in offsets}
    return Graph.from_edges(n, edges)


def cycle(n: int) -> Graph:
    return circulant(n, [1])


def path(n: int) -> Graph:
    return Graph.from_edges(n, ((j, j + 1) for j in range(n - 1)))


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    shift = 0
    for g in graphs:
        edges.extend((u + shift, v + shift) for u, v in g.edges)
        shift += g.n
    return Graph.from_edges(shift, edges)


def random_even_graph(n: int, toggles: int, seed: int) -> Graph:
    """Random even-degree graph reached by XOR-ing random triangles.

    Odd ``n`` starts from ``K_n``; even ``n`` starts from ``circulant(n, {1, 2})``.
    A triangle flip changes each of its three vertex degrees by 0 or +-2,
    so every intermediate graph keeps all degrees even.
    """
    if n < 3:
        raise ValueError("random_even_graph needs n >= 3")
    if n % 2 == 1:
        start = complete(n)
    elif n >= 6:
        start = circulant(n, [1, 2])
    else:
        # circulant(4, {1, 2}) is K4, which has odd degrees
        raise ValueError("even n must be at least 6")
    rng = np.random.default_rng(seed)
    adj = list(start.adjacency)
    for _ in range(toggles):
        a, b, c = (int(x) for x in rng.choice(n, size=3, replace=False))
        for u, v in ((a, b), (b, c), (a, c)):
            adj[u] ^= 1 << v
            adj[v] ^= 1 << u
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if adj[u] >> v & 1]
    return Graph.from_edges(n, edges)


# -- predicates -----------------------------------------------------------------


def degree_sequence(g: Graph) -> list[int]:
    return [g.degree(v) for v in range(g.n)]


def is_all_even(g: Graph) -> bool:
    return all(d % 2 == 0 for d in degree_sequence(g))


def connected_components(g: Graph) -> list[set[int]]:
    unseen = (1 << g.n) - 1
    comps = []
    while unseen:
        low = unseen & -unseen
        comp = frontier = low
        while frontier:
            nxt = 0
            bits = frontier
            while bits:
                b = bits & -bits
                nxt |= g.adjacency[b.bit_length() - 1]
                bits ^= b
            frontier = nxt & ~comp
            comp |= frontier
        unseen &= ~comp
        comps.append({v for v in range(g.n) if comp >> v & 1})
    return comps


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) == 1

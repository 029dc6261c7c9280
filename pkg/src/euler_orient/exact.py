"""Exact counts of Eulerian orientations by two independent algorithms.

``eo_count_backtrack`` walks the orientations edge by edge and prunes on the
per-vertex imbalance; ``eo_count_dp`` sweeps edges once, keeping a table of
partial counts keyed by the imbalance of the vertices still in play. They
share no code beyond the graph type, which is what makes them useful as
oracles for each other.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor

from .errors import CapExceeded
from .graph import Graph, degree_sequence

__all__ = [
    "DEFAULT_EDGE_CAP",
    "DEFAULT_FRONTIER_CAP",
    "dfs_edge_order",
    "eo_count_backtrack",
    "eo_count_dp",
    "eo_count",
    "frontier_width",
]

DEFAULT_EDGE_CAP = 40
DEFAULT_FRONTIER_CAP = 20


def dfs_edge_order(g: Graph) -> list[tuple[int, int]]:
    """Edges in the order a depth-first search from vertex 0 first meets them."""
    order = []
    used: set[tuple[int, int]] = set()
    visited = [False] * g.n
    for root in range(g.n):
        if visited[root]:
            continue
        visited[root] = True
        stack = [root]
        while stack:
            u = stack.pop()
            for v in g.neighbors(u):
                key = (u, v) if u < v else (v, u)
                if key not in used:
                    used.add(key)
                    order.append(key)
                if not visited[v]:
                    visited[v] = True
                    stack.append(v)
    return order


def _count_from(edges, prefix, n, degrees) -> int:
    residual = [0] * n
    remaining = list(degrees)
    for (u, v), toward in zip(edges, prefix):
        d = 1 if toward else -1
        residual[u] += d
        residual[v] -= d
        remaining[u] -= 1
        remaining[v] -= 1
        if abs(residual[u]) > remaining[u] or abs(residual[v]) > remaining[v]:
            return 0
    return _backtrack(edges, len(prefix), residual, remaining)


def _backtrack(edges, k, residual, remaining) -> int:
    if k == len(edges):
        return 1
    u, v = edges[k]
    remaining[u] -= 1
    remaining[v] -= 1
    total = 0
    for d in (1, -1):
        residual[u] += d
        residual[v] -= d
        ru, rv = residual[u], residual[v]
        mu, mv = remaining[u], remaining[v]
        # leftover edges must be able to cancel the residual; the parity half of
        # this test holds automatically once every degree is even
        if abs(ru) <= mu and abs(rv) <= mv:
            total += _backtrack(edges, k + 1, residual, remaining)
        residual[u] -= d
        residual[v] += d
    remaining[u] += 1
    remaining[v] += 1
    return total


def eo_count_backtrack(g: Graph, edge_cap: int = DEFAULT_EDGE_CAP, threads: int = 1) -> int:
    """Number of Eulerian orientations by pruned depth-first search.

    With ``threads > 1`` the first few edges are fixed in every possible way
    and the subtrees are counted by a worker pool; the sum is the same.
    """
    if g.m > edge_cap:
        raise CapExceeded(f"{g.m} edges exceeds the backtracking cap of {edge_cap}")
    degrees = degree_sequence(g)
    if any(d % 2 for d in degrees):
        return 0
    edges = dfs_edge_order(g)
    if threads <= 1 or len(edges) < 4:
        return _backtrack(edges, 0, [0] * g.n, list(degrees))
    split = min(len(edges), max(2, (4 * threads - 1).bit_length()))
    prefixes = list(itertools.product((True, False), repeat=split))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(lambda p: _count_from(edges, p, g.n, degrees), prefixes)
        return sum(parts)


def _dp_order(g: Graph) -> list[tuple[int, int]]:
    return sorted(g.edges, key=lambda e: (e[1], e[0]))


def frontier_width(g: Graph) -> int:
    """Largest number of simultaneously open vertices in the DP edge order."""
    left = degree_sequence(g)
    open_: set[int] = set()
    width = 0
    for u, v in _dp_order(g):
        open_.update((u, v))
        width = max(width, len(open_))
        for w in (u, v):
            left[w] -= 1
            if left[w] == 0:
                open_.discard(w)
    return width


def eo_count_dp(g: Graph, frontier_cap: int = DEFAULT_FRONTIER_CAP) -> int:
    """Number of Eulerian orientations by a frontier dynamic programme.

    Edges are processed in order of their larger endpoint. The table maps the
    tuple of imbalances of frontier vertices (touched but not finished) to the
    number of partial orientations producing it. A vertex leaves the frontier
    once its last edge is placed, and only states where it is balanced survive.
    """
    degrees = degree_sequence(g)
    if any(d % 2 for d in degrees):
        return 0
    width = frontier_width(g)
    if width > frontier_cap:
        raise CapExceeded(f"frontier width {width} exceeds the cap of {frontier_cap}")
    edges = _dp_order(g)
    left = list(degrees)
    frontier: list[int] = []
    table: dict[tuple[int, ...], int] = {(): 1}
    for u, v in edges:
        for w in (u, v):
            if w not in frontier:
                frontier.append(w)
                table = {key + (0,): c for key, c in table.items()}
        iu, iv = frontier.index(u), frontier.index(v)
        left[u] -= 1
        left[v] -= 1
        nxt: dict[tuple[int, ...], int] = defaultdict(int)
        for key, c in table.items():
            for d in (1, -1):
                state = list(key)
                state[iu] += d
                state[iv] -= d
                if abs(state[iu]) > left[u] or abs(state[iv]) > left[v]:
                    continue
                nxt[tuple(state)] += c
        table = nxt
        for w in (u, v):
            if left[w] == 0:
                i = frontier.index(w)
                frontier.pop(i)
                # surviving states already have this entry equal to 0
                table = {key[:i] + key[i + 1 :]: c for key, c in table.items()}
        if not table:
            return 0
    return sum(table.values())


def eo_count(g: Graph, edge_cap: int = DEFAULT_EDGE_CAP,
             frontier_cap: int = DEFAULT_FRONTIER_CAP) -> int:
    """Exact count by whichever algorithm fits the caps, DP first."""
    try:
        return eo_count_dp(g, frontier_cap)
    except CapExceeded:
        return eo_count_backtrack(g, edge_cap)

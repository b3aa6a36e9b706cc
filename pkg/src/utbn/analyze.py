"""Temporal labelling, stack-freeness and reticulation-count bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .construct import UniversalNet
from .graph import PhyloNetwork
from .treegen import count_trees


class _UnionFind:
    def __init__(self, size):
        self.parent = list(range(size))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra > rb:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass(frozen=True)
class NotTemporal:
    """Witness that no time labelling exists.

    ``cycle`` is a closed walk of vertices: each step is a tree edge or an
    equality forced by reticulation edges, and at least one step is strict.
    """

    cycle: tuple[int, ...]

    def __bool__(self):
        return False


def temporal_labeling(net: PhyloNetwork) -> dict[int, int] | NotTemporal:
    """Time labels with ``t(u) < t(v)`` on tree edges and ``t(u) = t(v)`` on
    reticulation edges, or a :class:`NotTemporal` witness.

    Vertices joined by reticulation edges are merged into classes; classes
    are then labelled by their longest tree-edge distance from a source.
    """
    V = net.num_vertices
    uf = _UnionFind(V)
    for u, v in net.edges():
        if net.is_reticulation_edge(u, v):
            uf.union(u, v)
    cls = [uf.find(v) for v in range(V)]

    succ: dict[int, list[tuple[int, int, int]]] = {}
    indeg = {c: 0 for c in set(cls)}
    for u, v in net.edges():
        if not net.is_reticulation_edge(u, v):
            succ.setdefault(cls[u], []).append((cls[v], u, v))
            indeg[cls[v]] += 1

    depth = {c: 0 for c in indeg}
    ready = sorted(c for c, d in indeg.items() if d == 0)
    done = 0
    while ready:
        c = ready.pop()
        done += 1
        for d, _, _ in succ.get(c, ()):
            depth[d] = max(depth[d], depth[c] + 1)
            indeg[d] -= 1
            if indeg[d] == 0:
                ready.append(d)
    if done != len(indeg):
        return NotTemporal(_class_cycle(net, cls, succ, indeg))
    return {v: depth[cls[v]] for v in range(V)}


def _class_cycle(net, cls, succ, indeg) -> tuple[int, ...]:
    # every class still holding in-degree lies on or below a cycle; walking
    # backwards along remaining edges must close a loop
    pred: dict[int, tuple[int, int, int]] = {}
    for c, edges in succ.items():
        if indeg[c] > 0:
            for d, u, v in edges:
                if indeg[d] > 0:
                    pred.setdefault(d, (c, u, v))
    start = next(c for c, d in indeg.items() if d > 0 and c in pred)
    seen = []
    c = start
    while c not in seen:
        seen.append(c)
        c = pred[c][0]
    loop = seen[seen.index(c):]
    loop.reverse()
    walk = []
    for k, c in enumerate(loop):
        nxt = loop[(k + 1) % len(loop)]
        _, u, v = pred[nxt]
        walk += [u, v]
    return tuple(walk)


def check_time_labels(net: PhyloNetwork, t: dict[int, int]) -> list[tuple[int, int]]:
    """Edges whose labels break the temporal constraints."""
    bad = []
    for u, v in net.edges():
        if t[u] < 0 or t[v] < 0:
            bad.append((u, v))
        elif net.is_reticulation_edge(u, v):
            if t[u] != t[v]:
                bad.append((u, v))
        elif not t[u] < t[v]:
            bad.append((u, v))
    return bad


def is_stack_free(net: PhyloNetwork) -> bool:
    """True iff no reticulation is a parent of another reticulation."""
    return not any(
        len(net.parents[u]) == 2 and len(net.parents[v]) == 2 for u, v in net.edges()
    )


def info_bound(n: int) -> int:
    """ceil(log2 b_n): fewest reticulations that can display every tree."""
    return (count_trees(n) - 1).bit_length()


@dataclass(frozen=True)
class BoundReport:
    n: int
    r: int
    info_bound: int

    @property
    def ratio(self) -> float | None:
        """r / (n log2 n); ``None`` for n = 1."""
        if self.n < 2:
            return None
        return self.r / (self.n * math.log2(self.n))

    def format_ratio(self, digits: int = 4) -> str:
        ratio = self.ratio
        return "-" if ratio is None else f"{ratio:.{digits}f}"


def bound_report(U: UniversalNet) -> BoundReport:
    return BoundReport(U.n, U.net.reticulation_count, info_bound(U.n))


def at_most_n_log_n(count: int, n: int, factor: int = 1) -> bool:
    """Exact test of ``count <= factor * n * log2(n)`` via ``2^count <= n^(factor*n)``."""
    if count < 0:
        raise ValueError("count must be non-negative")
    return (1 << count) <= n ** (factor * n)

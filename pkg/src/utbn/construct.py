"""Builders for the caterpillar, the top scaffold, the Beneš bottom and U_n.

Public coordinates (all 1-based):

``("q", i)``
    spine vertex that is the parent of path ``i``'s head; ``("q", n)`` is
    the root and path 1 hangs from ``("q", 2)``.
``("v", i, p)``
    ``p``-th subdivision vertex on the pendant path to leaf ``i``, counted
    from the spine.  Odd ``p`` are reticulation slots, even ``p`` tree slots.
``("a", s, w)`` / ``("r", s, w)``
    tree vertex / reticulation that switch ``s`` inserts on wire ``w``.
``("leaf", i)``
    leaf ``i``, labelled ``str(i)``.

Cross edge ``(i, j)`` of the scaffold runs ``("v", i, 2j) -> ("v", i-1, 2j-1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Mapping, Sequence

from .benes import BenesNet, build_benes, switch_count
from .errors import InternalInvariantError
from .graph import PhyloNetwork, PhyloTree, suppress_degree_two, validate_network

Coord = tuple


def cross_count(i: int) -> int:
    """Number of cross edges between paths ``i`` and ``i-1``: floor(log2(i/2))."""
    return i.bit_length() - 2 if i >= 2 else 0


def reticulation_slots(i: int) -> int:
    """Odd subdivision slots on path ``i``: floor(log2((i+1)/2))."""
    return (i + 1).bit_length() - 2 if i >= 2 else 0


def subdivision_count(i: int) -> int:
    """Subdivision vertices placed on the pendant edge of leaf ``i``."""
    if i < 2:
        raise ValueError("path index must be at least 2")
    return cross_count(i) + reticulation_slots(i)


def scaffold_reticulation_slots(n: int) -> int:
    return sum(reticulation_slots(i) for i in range(2, n + 1))


def universal_reticulation_count(n: int) -> int:
    """Reticulations of U_n, computed from the size formulas alone."""
    if n < 2:
        return 0
    return sum(reticulation_slots(i) for i in range(2, n)) + 2 * switch_count(n)


_TAG_RANK = {"q": 0, "v": 1, "a": 2, "r": 2, "leaf": 3}


def coord_key(c: Coord):
    """Total order on coordinates: spine from the root down, then paths,
    then switch gadgets, then leaves."""
    tag = c[0]
    if tag == "q":
        return (0, -c[1])
    if tag in ("a", "r"):
        return (2, c[1], c[2], 0 if tag == "a" else 1)
    return (_TAG_RANK[tag],) + tuple(c[1:])


def build_caterpillar(labels: Sequence[str]) -> PhyloTree:
    """Caterpillar ``(l_1, ..., l_n)``: leaves 1 and 2 form the cherry and
    the root is the parent of ``l_n``."""
    labels = [str(x) for x in labels]
    n = len(labels)
    if n == 0:
        raise ValueError("at least one label is required")
    if n == 1:
        return PhyloTree(1, [], {0: labels[0]})
    # spine q_n .. q_2 take ids 0 .. n-2, leaves follow
    spine = {i: n - i for i in range(2, n + 1)}
    leaf = {i: n - 2 + i for i in range(1, n + 1)}
    edges = []
    for i in range(n, 1, -1):
        edges.append((spine[i], spine[i - 1] if i > 2 else leaf[1]))
        edges.append((spine[i], leaf[i]))
    return PhyloTree(2 * n - 1, edges, {leaf[i]: labels[i - 1] for i in range(1, n + 1)})


@dataclass(frozen=True)
class Scaffold:
    """Coordinate form of the top half A_n."""

    n: int

    def path_length(self, i: int) -> int:
        return subdivision_count(i) if i >= 2 else 0

    @cached_property
    def cross_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (i, j) for i in range(2, self.n + 1) for j in range(1, cross_count(i) + 1)
        )

    def path(self, i: int) -> list[Coord]:
        return [("v", i, p) for p in range(1, self.path_length(i) + 1)]

    @staticmethod
    def cross_source(i: int, j: int) -> Coord:
        return ("v", i, 2 * j)

    @staticmethod
    def cross_target(i: int, j: int) -> Coord:
        return ("v", i - 1, 2 * j - 1)

    def cross_edge_coords(self) -> list[tuple[Coord, Coord]]:
        return [(self.cross_source(i, j), self.cross_target(i, j)) for i, j in self.cross_edges]

    @property
    def reticulation_slot_total(self) -> int:
        return scaffold_reticulation_slots(self.n)

    def to_network(self) -> PhyloNetwork:
        """A_n as a digraph, unmatched slots on the last path included."""
        return _assemble(self.n, self, None)


def build_top_scaffold(n: int) -> Scaffold:
    if n < 1:
        raise ValueError("n must be at least 1")
    return Scaffold(n)


@dataclass(frozen=True)
class Bottom:
    """The Beneš half: one path per wire, two gadget vertices per switch."""

    benes: BenesNet

    @property
    def n(self) -> int:
        return self.benes.n

    def path(self, wire: int) -> list[Coord]:
        """Gadget coordinates on 1-based ``wire``, in signal order."""
        out = []
        for s in self.benes.switches_on(wire - 1):
            out += [("a", s.id + 1, wire), ("r", s.id + 1, wire)]
        return out

    def cross_edge_coords(self) -> list[tuple[Coord, Coord]]:
        out = []
        for s in self.benes.switches:
            w0, w1 = s.wires[0] + 1, s.wires[1] + 1
            out.append((("a", s.id + 1, w0), ("r", s.id + 1, w1)))
            out.append((("a", s.id + 1, w1), ("r", s.id + 1, w0)))
        return out

    @property
    def reticulation_count(self) -> int:
        return 2 * self.benes.switch_count


def build_bottom(n: int) -> Bottom:
    return Bottom(build_benes(n))


def _assemble(n: int, top: Scaffold, bottom: Bottom | None) -> PhyloNetwork:
    coord_edges: list[tuple[Coord, Coord]] = []
    coords: list[Coord] = [("q", i) for i in range(2, n + 1)]
    for i in range(3, n + 1):
        coord_edges.append((("q", i), ("q", i - 1)))
    for i in range(1, n + 1):
        chain = top.path(i) + (bottom.path(i) if bottom else []) + [("leaf", i)]
        coords += chain
        prev = ("q", max(i, 2)) if n > 1 else None
        for c in chain:
            if prev is not None:
                coord_edges.append((prev, c))
            prev = c
    coord_edges += top.cross_edge_coords()
    if bottom is not None:
        coord_edges += bottom.cross_edge_coords()
    coords.sort(key=coord_key)
    index = {c: v for v, c in enumerate(coords)}
    edges = sorted((index[u], index[v]) for u, v in coord_edges)
    labels = {index[("leaf", i)]: str(i) for i in range(1, n + 1)}
    return PhyloNetwork(len(coords), edges, labels, coords)


@dataclass(frozen=True, eq=False)
class UniversalNet:
    """U_n together with the coordinate maps used to address it."""

    n: int
    net: PhyloNetwork
    scaffold: Scaffold
    bottom: Bottom

    @property
    def benes(self) -> BenesNet:
        return self.bottom.benes

    @property
    def reticulation_count(self) -> int:
        return self.net.reticulation_count

    def vertex(self, coord: Coord) -> int:
        return self.net.vertex(coord)

    def coord(self, v: int) -> Coord:
        return self.net.coords[v]

    @cached_property
    def switch_map(self) -> dict[int, tuple[int, int]]:
        """0-based switch id -> the two gadget reticulations it owns."""
        out = {}
        for s in self.benes.switches:
            w0, w1 = s.wires
            out[s.id] = (self.vertex(("r", s.id + 1, w0 + 1)), self.vertex(("r", s.id + 1, w1 + 1)))
        return out

    def vertical_parent(self, r: int) -> int:
        """The in-neighbour of reticulation ``r`` on its own path."""
        c = self.coord(r)
        if c[0] == "r":
            return self.vertex(("a", c[1], c[2]))
        if c[0] == "v":
            cross = self.vertex(Scaffold.cross_source(c[1] + 1, (c[2] + 1) // 2))
            (p,) = [u for u in self.net.parents[r] if u != cross]
            return p
        raise KeyError(f"{c} is not a reticulation coordinate")

    def vertical_choice(self) -> dict[int, int]:
        """Every reticulation keeps its vertical in-edge."""
        return {r: self.vertical_parent(r) for r in self.net.reticulations}

    def choice_from(self, active: set[tuple[int, int]], settings: Mapping[int, bool]) -> dict[int, int]:
        """Translate active scaffold cross edges plus switch settings into a
        choice on ``net``."""
        choice = {}
        for r in self.net.reticulations:
            c = self.coord(r)
            if c[0] == "v":
                i, p = c[1], c[2]
                j = (p + 1) // 2
                if (i + 1, j) in active:
                    choice[r] = self.vertex(Scaffold.cross_source(i + 1, j))
                else:
                    choice[r] = self.vertical_parent(r)
            else:
                s, w = c[1], c[2]
                if settings[s - 1]:
                    w0, w1 = self.benes.switches[s - 1].wires
                    other = w1 + 1 if w == w0 + 1 else w0 + 1
                    choice[r] = self.vertex(("a", s, other))
                else:
                    choice[r] = self.vertex(("a", s, w))
        return choice


def build_universal(n: int) -> UniversalNet:
    """Assemble U_n: scaffold paths continue into Beneš wires, then every
    degree-two vertex is suppressed."""
    if n < 1:
        raise ValueError("n must be at least 1")
    top = build_top_scaffold(n)
    bottom = build_bottom(n)
    net = suppress_degree_two(_assemble(n, top, bottom))
    report = validate_network(net)
    if not report.ok:
        raise InternalInvariantError(f"U_{n} is not a phylogenetic network: {report}")
    return UniversalNet(n, net, top, bottom)

"""Graph model for rooted phylogenetic networks and trees.

Vertices are dense integer ids ``0..V-1``.  A vertex's kind is derived from
its degrees, so the same class also holds intermediate digraphs (spanning
subgraphs, unsuppressed scaffolds) that are not valid networks.  All tree
and shape comparisons go through canonical string encodings; vertex ids
never take part in equality.
"""
from __future__ import annotations

import enum
import itertools
import json
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import (
    CapExceededError,
    ChildlessVertexError,
    DisconnectedError,
    InvalidChoiceError,
    StructuralError,
)

Edge = tuple[int, int]
#: Maps each reticulation to the parent whose edge is kept.
BaseTreeChoice = Mapping[int, int]


class VertexKind(enum.Enum):
    ROOT = "root"
    LEAF = "leaf"
    TREE = "tree"
    RETICULATION = "reticulation"
    INVALID = "invalid"


_CHUNK = re.compile(r"(\d+)")


def label_key(label: str):
    """Numeric-aware sort key, so ``"2" < "10"`` and ``"a2" < "a10"``."""
    parts = []
    for i, chunk in enumerate(_CHUNK.split(label)):
        if i % 2:
            parts.append((0, int(chunk), chunk))
        elif chunk:
            parts.append((1, 0, chunk))
    return tuple(parts)


class PhyloNetwork:
    """Rooted digraph with labelled sinks.

    Parameters
    ----------
    num_vertices : int
        Vertices are ``0..num_vertices-1``.
    edges : iterable of (parent, child)
        Child order per vertex follows the order given here.
    labels : mapping vertex -> str, optional
        Leaf labels.
    coords : sequence, optional
        One hashable coordinate per vertex (used by the universal network's
        public addressing scheme).  ``None`` for plain graphs.
    """

    def __init__(
        self,
        num_vertices: int,
        edges: Iterable[Edge],
        labels: Mapping[int, str] | None = None,
        coords: Sequence[Hashable] | None = None,
    ):
        children: list[list[int]] = [[] for _ in range(num_vertices)]
        parents: list[list[int]] = [[] for _ in range(num_vertices)]
        for u, v in edges:
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise StructuralError(f"edge ({u}, {v}) has an endpoint outside 0..{num_vertices - 1}")
            children[u].append(v)
            parents[v].append(u)
        self.children: tuple[tuple[int, ...], ...] = tuple(map(tuple, children))
        self.parents: tuple[tuple[int, ...], ...] = tuple(map(tuple, parents))
        self.labels: dict[int, str] = dict(labels or {})
        if coords is not None:
            coords = tuple(coords)
            if len(coords) != num_vertices:
                raise StructuralError("one coordinate per vertex required")
        self.coords: tuple[Hashable, ...] | None = coords
        sources = [v for v in range(num_vertices) if not parents[v]]
        self.root: int | None = sources[0] if sources else None

    @classmethod
    def from_edges(cls, edges, labels=None, vertices=None):
        """Build from edges over arbitrary hashable vertex names.

        When ``labels`` is omitted every sink is labelled ``str(name)``.
        """
        edges = list(edges)
        order = list(vertices) if vertices is not None else []
        seen = set(order)
        for e in edges:
            for x in e:
                if x not in seen:
                    seen.add(x)
                    order.append(x)
        index = {x: i for i, x in enumerate(order)}
        int_edges = [(index[u], index[v]) for u, v in edges]
        if labels is None:
            has_child = {u for u, _ in edges}
            int_labels = {index[x]: str(x) for x in order if x not in has_child}
        else:
            int_labels = {index[x]: str(lab) for x, lab in labels.items()}
        return cls(len(order), int_edges, int_labels)

    # -- basic queries -------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.children)

    @property
    def num_edges(self) -> int:
        return sum(len(c) for c in self.children)

    def edges(self) -> Iterator[Edge]:
        for u, kids in enumerate(self.children):
            for v in kids:
                yield (u, v)

    def in_degree(self, v: int) -> int:
        return len(self.parents[v])

    def out_degree(self, v: int) -> int:
        return len(self.children[v])

    def kind(self, v: int) -> VertexKind:
        i, o = len(self.parents[v]), len(self.children[v])
        if i == 0:
            if o == 2 or (o == 0 and self.num_vertices == 1):
                return VertexKind.LEAF if o == 0 else VertexKind.ROOT
            return VertexKind.INVALID
        return _KINDS.get((i, o), VertexKind.INVALID)

    @cached_property
    def reticulations(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.num_vertices) if len(self.parents[v]) == 2)

    @property
    def reticulation_count(self) -> int:
        return len(self.reticulations)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.num_vertices) if not self.children[v])

    @cached_property
    def vertex_of_label(self) -> dict[str, int]:
        return {lab: v for v, lab in self.labels.items()}

    @property
    def label_set(self) -> frozenset[str]:
        return frozenset(self.labels.values())

    @cached_property
    def coord_index(self) -> dict[Hashable, int]:
        if self.coords is None:
            return {}
        return {c: v for v, c in enumerate(self.coords)}

    def vertex(self, coord: Hashable) -> int:
        """Vertex id at a coordinate; ``KeyError`` if absent."""
        return self.coord_index[coord]

    def coord(self, v: int) -> Hashable | None:
        return None if self.coords is None else self.coords[v]

    def is_reticulation_edge(self, u: int, v: int) -> bool:
        return len(self.parents[v]) == 2

    def __repr__(self):
        return (
            f"{type(self).__name__}(V={self.num_vertices}, E={self.num_edges}, "
            f"leaves={len(self.labels)}, r={self.reticulation_count})"
        )


_KINDS = {
    (1, 0): VertexKind.LEAF,
    (1, 2): VertexKind.TREE,
    (2, 1): VertexKind.RETICULATION,
}


class PhyloTree(PhyloNetwork):
    """A network in which no vertex has more than one parent."""

    def __init__(self, num_vertices, edges, labels=None, coords=None):
        super().__init__(num_vertices, edges, labels, coords)
        for v, ps in enumerate(self.parents):
            if len(ps) > 1:
                raise StructuralError(f"vertex {v} has {len(ps)} parents; not a tree")

    @classmethod
    def from_network(cls, net: PhyloNetwork) -> "PhyloTree":
        return cls(net.num_vertices, net.edges(), net.labels, net.coords)


def _make(num_vertices, edges, labels, coords) -> PhyloNetwork:
    """Return a PhyloTree when possible, otherwise a PhyloNetwork."""
    edges = list(edges)
    indeg = [0] * num_vertices
    for _, v in edges:
        indeg[v] += 1
    cls = PhyloTree if all(d <= 1 for d in indeg) else PhyloNetwork
    return cls(num_vertices, edges, labels, coords)


def relabel_vertices(net: PhyloNetwork, perm: Sequence[int]) -> PhyloNetwork:
    """Rename vertex ``v`` to ``perm[v]``; structure is unchanged."""
    inv = [0] * len(perm)
    for old, new in enumerate(perm):
        inv[new] = old
    edges = sorted((perm[u], perm[v]) for u, v in net.edges())
    labels = {perm[v]: lab for v, lab in net.labels.items()}
    coords = None if net.coords is None else [net.coords[inv[i]] for i in range(len(perm))]
    return _make(net.num_vertices, edges, labels, coords)


def topological_order(net: PhyloNetwork) -> list[int]:
    """Kahn order with smallest-id tie-breaking; raises on a cycle."""
    indeg = [len(p) for p in net.parents]
    ready = [v for v in range(net.num_vertices) if indeg[v] == 0]
    ready.reverse()
    order = []
    while ready:
        v = ready.pop()
        order.append(v)
        for c in reversed(net.children[v]):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    if len(order) != net.num_vertices:
        raise StructuralError("digraph contains a directed cycle")
    return order


# -- validation ----------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[tuple[str, object], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def rules(self) -> set[str]:
        return {rule for rule, _ in self.violations}

    def __str__(self):
        if self.ok:
            return "ok"
        return "; ".join(f"{rule}: {where}" for rule, where in self.violations)


def validate_network(net: PhyloNetwork) -> ValidationReport:
    """List every violated phylogenetic-network condition of ``net``."""
    out: list[tuple[str, object]] = []
    V = net.num_vertices
    if V == 0:
        return ValidationReport((("empty", None),))
    if V == 1:
        if net.num_edges:
            out.append(("cycle", (0,)))
        if 0 not in net.labels:
            out.append(("leaf-label", 0))
        return ValidationReport(tuple(out))

    roots = [v for v in range(V) if not net.parents[v]]
    if len(roots) != 1:
        out.append(("root-count", tuple(roots)))
    for r in roots:
        if net.out_degree(r) != 2:
            out.append(("root-degree", r))
    for v in range(V):
        if net.parents[v] and net.kind(v) is VertexKind.INVALID:
            out.append(("degree", v))

    seen_edges = set()
    for e in net.edges():
        if e in seen_edges:
            out.append(("parallel-edge", e))
        seen_edges.add(e)

    try:
        topological_order(net)
    except StructuralError:
        out.append(("cycle", _cycle_witness(net)))

    seen_labels: dict[str, int] = {}
    for v in range(V):
        lab = net.labels.get(v)
        if net.children[v]:
            if lab is not None:
                out.append(("label-on-internal", v))
        elif lab is None:
            out.append(("leaf-label", v))
        if lab is not None:
            if lab in seen_labels:
                out.append(("duplicate-label", lab))
            seen_labels[lab] = v
    return ValidationReport(tuple(out))


def _cycle_witness(net: PhyloNetwork) -> tuple[int, ...]:
    color = [0] * net.num_vertices
    for s in range(net.num_vertices):
        if color[s]:
            continue
        stack = [(s, iter(net.children[s]))]
        path = [s]
        color[s] = 1
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                color[v] = 2
            elif color[nxt] == 1:
                return tuple(path[path.index(nxt):])
            elif color[nxt] == 0:
                color[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(net.children[nxt])))
    return ()


# -- suppression and canonical forms -------------------------------------


def suppress_degree_two(net: PhyloNetwork) -> PhyloNetwork:
    """Contract every in-degree-1/out-degree-1 vertex and strip a unary root.

    Surviving vertices keep their relative id order, labels and coordinates.
    Returns a :class:`PhyloTree` whenever the result has no reticulation.
    """
    if net.root is None:
        raise StructuralError("digraph has no root")
    removed = set()
    r = net.root
    while len(net.children[r]) == 1:
        c = net.children[r][0]
        if len(net.parents[c]) != 1:
            raise StructuralError(f"unary root {r} feeds vertex {c} with several parents")
        removed.add(r)
        r = c

    def passthrough(v):
        return len(net.parents[v]) == 1 and len(net.children[v]) == 1 and v != r

    keep = [v for v in range(net.num_vertices) if v not in removed and not passthrough(v)]
    new_id = {v: i for i, v in enumerate(keep)}
    edges = []
    seen = set()
    for u in keep:
        for c in net.children[u]:
            while passthrough(c):
                c = net.children[c][0]
            e = (new_id[u], new_id[c])
            if e in seen:
                raise StructuralError(f"suppression creates parallel edges {u} -> {c}")
            seen.add(e)
            edges.append(e)
    labels = {new_id[v]: lab for v, lab in net.labels.items() if v in new_id}
    coords = None if net.coords is None else [net.coords[v] for v in keep]
    return _make(len(keep), edges, labels, coords)


def _preorder_tree(tree: PhyloNetwork) -> list[int]:
    order = []
    stack = [tree.root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(reversed(tree.children[v]))
    return order


def _require_tree(tree: PhyloNetwork):
    if any(len(p) > 1 for p in tree.parents):
        raise StructuralError("operation needs a tree (no vertex with two parents)")


def tree_encoding(tree: PhyloNetwork) -> str:
    """Canonical labelled encoding; equal strings iff equal rooted trees."""
    _require_tree(tree)
    enc: dict[int, str] = {}
    for v in reversed(_preorder_tree(tree)):
        kids = tree.children[v]
        if not kids:
            enc[v] = json.dumps(tree.labels.get(v, ""))
        else:
            enc[v] = "(" + ",".join(sorted(enc[c] for c in kids)) + ")"
    return enc[tree.root]


def tree_equal(t1: PhyloNetwork, t2: PhyloNetwork) -> bool:
    return tree_encoding(t1) == tree_encoding(t2)


@dataclass(frozen=True, eq=False)
class TreeShape:
    """Unlabelled rooted tree with canonically ordered children.

    Build with :meth:`leaf` and :meth:`join`; ``children`` is always sorted
    by encoding, so two shapes are equal iff their encodings are.
    """

    children: tuple["TreeShape", ...] = ()

    @classmethod
    def leaf(cls) -> "TreeShape":
        return _LEAF

    @classmethod
    def join(cls, *parts: "TreeShape") -> "TreeShape":
        return cls(tuple(sorted(parts, key=lambda s: s.encoding)))

    @cached_property
    def encoding(self) -> str:
        if not self.children:
            return "*"
        return "(" + ",".join(c.encoding for c in self.children) + ")"

    @cached_property
    def size(self) -> int:
        if not self.children:
            return 1
        return sum(c.size for c in self.children)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def __eq__(self, other):
        return isinstance(other, TreeShape) and self.encoding == other.encoding

    def __hash__(self):
        return hash(self.encoding)

    def __repr__(self):
        return f"TreeShape({self.encoding})"


_LEAF = TreeShape()


def _shape_table(tree: PhyloNetwork) -> dict[int, TreeShape]:
    _require_tree(tree)
    shapes: dict[int, TreeShape] = {}
    for v in reversed(_preorder_tree(tree)):
        kids = tree.children[v]
        shapes[v] = TreeShape.join(*(shapes[c] for c in kids)) if kids else _LEAF
    return shapes


def shape_of(tree: PhyloNetwork) -> TreeShape:
    return _shape_table(tree)[tree.root]


def canonical_leaf_order(tree: PhyloNetwork) -> list[str]:
    """Leaf labels in the depth-first order of the tree's canonical shape.

    Children are visited in the same order :meth:`TreeShape.join` sorts
    them, so the k-th label here sits on the k-th leaf of ``shape_of(tree)``.
    Ties between identical sub-shapes are broken by labelled encoding.
    """
    shapes = _shape_table(tree)
    enc: dict[int, str] = {}
    for v in reversed(_preorder_tree(tree)):
        kids = tree.children[v]
        enc[v] = (
            "(" + ",".join(sorted(enc[c] for c in kids)) + ")"
            if kids
            else json.dumps(tree.labels.get(v, ""))
        )
    out = []
    stack = [tree.root]
    while stack:
        v = stack.pop()
        kids = tree.children[v]
        if not kids:
            out.append(tree.labels[v])
            continue
        ordered = sorted(kids, key=lambda c: (shapes[c].encoding, enc[c]))
        stack.extend(reversed(ordered))
    return out


def tree_from_shape(shape: TreeShape, labels: Sequence[str]) -> PhyloTree:
    """Label the leaves of ``shape`` in depth-first order."""
    if len(labels) != shape.size:
        raise ValueError(f"shape has {shape.size} leaves, got {len(labels)} labels")
    edges = []
    lab = {}
    counter = itertools.count()
    leaf_iter = iter(labels)
    root = next(counter)
    stack = [(shape, root)]
    while stack:
        s, v = stack.pop()
        if s.is_leaf:
            lab[v] = str(next(leaf_iter))
            continue
        ids = [next(counter) for _ in s.children]
        for c in ids:
            edges.append((v, c))
        stack.extend(reversed(list(zip(s.children, ids))))
    return PhyloTree(next(counter), edges, lab)


# -- base trees ----------------------------------------------------------


def _check_choice(net: PhyloNetwork, choice: BaseTreeChoice):
    rets = set(net.reticulations)
    keys = set(choice)
    if keys != rets:
        missing = sorted(rets - keys)
        extra = sorted(keys - rets)
        raise InvalidChoiceError(
            f"choice domain differs from the reticulation set (missing {missing[:5]}, extra {extra[:5]})"
        )
    for r, p in choice.items():
        if p not in net.parents[r]:
            raise InvalidChoiceError(f"vertex {p} is not a parent of reticulation {r}")


def _kept_edges(net: PhyloNetwork, choice: BaseTreeChoice) -> list[Edge]:
    return [
        (u, v)
        for u, v in net.edges()
        if len(net.parents[v]) != 2 or choice[v] == u
    ]


def resolve_choice(net: PhyloNetwork, choice: BaseTreeChoice) -> PhyloTree:
    """Delete the unchosen in-edge of every reticulation.

    The result spans every vertex of ``net``.  Raises
    :class:`ChildlessVertexError` if a vertex that had children keeps none,
    and :class:`DisconnectedError` if some vertex is unreachable.
    """
    _check_choice(net, choice)
    edges = _kept_edges(net, choice)
    outdeg = [0] * net.num_vertices
    for u, _ in edges:
        outdeg[u] += 1
    for v in range(net.num_vertices):
        if net.children[v] and not outdeg[v]:
            raise ChildlessVertexError(v)
    sub = PhyloTree(net.num_vertices, edges, net.labels, net.coords)
    seen = [False] * net.num_vertices
    if sub.root is not None:
        seen[sub.root] = True
        queue = deque([sub.root])
        while queue:
            v = queue.popleft()
            for c in sub.children[v]:
                if not seen[c]:
                    seen[c] = True
                    queue.append(c)
    unreached = [v for v in range(net.num_vertices) if not seen[v]]
    if unreached or sub.root != net.root:
        raise DisconnectedError(unreached)
    return sub


def base_tree_violations(net: PhyloNetwork, choice: BaseTreeChoice, tree: PhyloNetwork) -> list[str]:
    """Reasons why ``choice`` fails to certify ``tree`` as a base tree of ``net``."""
    try:
        spanning = resolve_choice(net, choice)
    except InvalidChoiceError as e:
        return [f"invalid-choice: {e}"]
    except ChildlessVertexError as e:
        return [f"childless-vertex: {e}"]
    except DisconnectedError as e:
        return [f"disconnected: {e}"]
    try:
        got = suppress_degree_two(spanning)
    except StructuralError as e:
        return [f"structural: {e}"]
    want = tree_encoding(tree)
    have = tree_encoding(got)
    if have != want:
        return [f"tree-mismatch: choice yields {have}, expected {want}"]
    return []


def verify_base_tree(net: PhyloNetwork, choice: BaseTreeChoice, tree: PhyloNetwork) -> bool:
    return not base_tree_violations(net, choice, tree)


# -- display -------------------------------------------------------------


def displayed_tree(net: PhyloNetwork, choice: BaseTreeChoice) -> PhyloTree:
    """Tree displayed by one in-edge choice: drop the other in-edges, prune
    unlabelled dead ends, then suppress.  Spanning is not required."""
    _check_choice(net, choice)
    edges = _kept_edges(net, choice)
    kids: list[list[int]] = [[] for _ in range(net.num_vertices)]
    for u, v in edges:
        kids[u].append(v)
    alive = [False] * net.num_vertices
    for v in reversed(topological_order(net)):
        alive[v] = v in net.labels if not kids[v] else any(alive[c] for c in kids[v])
    keep = [v for v in range(net.num_vertices) if alive[v]]
    if net.root not in keep:
        raise StructuralError("no labelled leaf is reachable")
    new_id = {v: i for i, v in enumerate(keep)}
    sub = PhyloTree(
        len(keep),
        [(new_id[u], new_id[v]) for u, v in edges if alive[u] and alive[v]],
        {new_id[v]: lab for v, lab in net.labels.items() if alive[v]},
    )
    return suppress_degree_two(sub)


def _all_choices(net: PhyloNetwork, cap: int) -> Iterator[dict[int, int]]:
    rets = net.reticulations
    if len(rets) > cap:
        raise CapExceededError(len(rets), cap)
    for picks in itertools.product(*(net.parents[r] for r in rets)):
        yield dict(zip(rets, picks))


def displayed_trees(net: PhyloNetwork, cap: int = 16) -> set[str]:
    """Canonical encodings of every tree displayed by ``net`` (2^r sweep)."""
    return {tree_encoding(displayed_tree(net, c)) for c in _all_choices(net, cap)}


def displays_bruteforce(net: PhyloNetwork, tree: PhyloNetwork, cap: int = 16) -> bool:
    """Exhaustively test whether ``net`` displays ``tree``."""
    want = tree_encoding(tree)
    return any(tree_encoding(displayed_tree(net, c)) == want for c in _all_choices(net, cap))


__all__ = [
    "BaseTreeChoice",
    "PhyloNetwork",
    "PhyloTree",
    "TreeShape",
    "ValidationReport",
    "VertexKind",
    "base_tree_violations",
    "canonical_leaf_order",
    "displayed_tree",
    "displayed_trees",
    "displays_bruteforce",
    "label_key",
    "relabel_vertices",
    "resolve_choice",
    "shape_of",
    "suppress_degree_two",
    "topological_order",
    "tree_encoding",
    "tree_equal",
    "tree_from_shape",
    "validate_network",
    "verify_base_tree",
]

"""Realise any rooted binary tree as a base tree of U_n.

The top half is handled by a recursion on the tree shape.  At a vertex with
subtrees of sizes ``t1 >= t2`` the larger subtree goes onto paths
``1..t1``, which together with their spine form an exact copy of A_t1.
Cross edge ``(i, 1)`` is activated for every ``i`` in ``t1+2..m``; that
detaches paths ``t1+1..m-1`` from the spine and hangs each of them off the
next path to the right.  What remains on paths ``t1+1..m`` is a copy of
A_t2 in which local cross edge ``(l, j)`` is global edge ``(t1+l, j+1)``;
higher-indexed surplus edges stay inactive.  The recursion works on local
path indices and is projected by offsetting, so each level only needs to
know its own size.

The bottom half is a Beneš routing of the order in which the top half
delivers the labels.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from .benes import Permutation, SwitchSettings, check_permutation, route
from .construct import UniversalNet, build_top_scaffold, build_universal, cross_count
from .errors import InternalInvariantError, LabelMismatchError, ShapeMismatchError
from .graph import (
    PhyloNetwork,
    TreeShape,
    base_tree_violations,
    canonical_leaf_order,
    shape_of,
    tree_from_shape,
)
from .treegen import count_trees, enumerate_trees


@dataclass(frozen=True)
class TopEmbedding:
    """Embedding of a shape into A_n.

    ``active`` holds the cross edges ``(i, j)`` whose reticulation takes the
    cross in-edge.  ``slot_order[k]`` is the path on which the k-th leaf of
    ``shape`` (depth-first, canonical child order) leaves A_n.
    """

    shape: TreeShape
    n: int
    active: frozenset[tuple[int, int]]
    slot_order: tuple[int, ...]


@dataclass(frozen=True)
class EmbedCertificate:
    choice: dict[int, int]
    top: TopEmbedding
    perm: Permutation
    settings: SwitchSettings


def _split(shape: TreeShape) -> tuple[TreeShape, TreeShape, bool]:
    """Return (larger, smaller, larger_is_first_child)."""
    c0, c1 = shape.children
    if c1.size > c0.size:
        return c1, c0, False
    # equal sizes: the first child has the smaller encoding
    return c0, c1, True


@lru_cache(maxsize=4096)
def _embed(shape: TreeShape) -> tuple[frozenset[tuple[int, int]], tuple[int, ...]]:
    m = shape.size
    if m <= 3:
        # one shape per size; the caterpillar needs no cross edge
        return frozenset(), tuple(range(1, m + 1))
    big, small, big_first = _split(shape)
    t1 = big.size
    big_active, big_slots = _embed(big)
    small_active, small_slots = _embed(small)

    active = set(big_active)
    for i in range(t1 + 2, m + 1):
        _spend(active, i, 1)
    for l, j in small_active:
        _spend(active, t1 + l, j + 1)

    small_slots = tuple(t1 + s for s in small_slots)
    slots = big_slots + small_slots if big_first else small_slots + big_slots
    return frozenset(active), slots


def _spend(active: set, i: int, j: int) -> None:
    if not 1 <= j <= cross_count(i):
        raise InternalInvariantError(f"cross edge ({i}, {j}) exceeds the budget {cross_count(i)}")
    active.add((i, j))


@lru_cache(maxsize=64)
def _scaffold_network(n: int) -> PhyloNetwork:
    return build_top_scaffold(n).to_network()


def scaffold_choice(net: PhyloNetwork, active) -> dict[int, int]:
    """Induced choice on a network carrying scaffold coordinates: a slot
    reticulation takes its cross in-edge iff that edge is active."""
    choice = {}
    for r in net.reticulations:
        tag, i, p = net.coords[r]
        j = (p + 1) // 2
        cross = net.vertex(("v", i + 1, 2 * j))
        if (i + 1, j) in active:
            choice[r] = cross
        else:
            (choice[r],) = [u for u in net.parents[r] if u != cross]
    return choice


@lru_cache(maxsize=4096)
def embed_shape_top(shape: TreeShape, n: int) -> TopEmbedding:
    """Embed ``shape`` in A_n so that every scaffold vertex is used.

    The result is checked against the scaffold digraph before it is
    returned; a failed check raises :class:`InternalInvariantError`.
    """
    if shape.size != n:
        raise ShapeMismatchError(f"shape has {shape.size} leaves, scaffold has {n} paths")
    active, slots = _embed(shape)
    top = TopEmbedding(shape, n, active, slots)
    net = _scaffold_network(n)
    expected = tree_from_shape(shape, [str(s) for s in slots])
    problems = base_tree_violations(net, scaffold_choice(net, active), expected)
    if problems:
        raise InternalInvariantError(f"top embedding of {shape.encoding} on A_{n}: {problems[0]}")
    return top


def required_permutation(tree: PhyloNetwork, top: TopEmbedding, positions=None) -> Permutation:
    """Permutation the bottom half must realise for ``tree``.

    ``result[i-1]`` is the output position of the label that leaves the top
    half on path ``i``.  ``positions`` maps label -> output position and
    defaults to ``int(label)``.
    """
    if shape_of(tree) != top.shape:
        raise ShapeMismatchError("tree shape differs from the embedded shape")
    pos = positions if positions is not None else {lab: int(lab) for lab in tree.label_set}
    perm = [0] * top.n
    for label, path in zip(canonical_leaf_order(tree), top.slot_order):
        perm[path - 1] = pos[label]
    return check_permutation(perm)


def embed_tree(U: UniversalNet, tree: PhyloNetwork) -> EmbedCertificate:
    """Base-tree certificate for ``tree`` in ``U``, verified before return."""
    if tree.label_set != U.net.label_set:
        raise LabelMismatchError(
            f"tree labels {sorted(tree.label_set)} differ from the network's {sorted(U.net.label_set)}"
        )
    top = embed_shape_top(shape_of(tree), U.n)
    positions = {U.net.labels[v]: U.coord(v)[1] for v in U.net.leaves}
    perm = required_permutation(tree, top, positions)
    settings = route(U.benes, perm)
    choice = U.choice_from(top.active, settings)
    problems = base_tree_violations(U.net, choice, tree)
    if problems:
        raise InternalInvariantError(f"certificate rejected: {problems[0]}")
    return EmbedCertificate(choice, top, perm, settings)


@dataclass
class UniversalityReport:
    n: int
    total: int
    verified: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return self.verified == self.total and not self.failures

    def __str__(self):
        return f"{self.verified}/{self.total} verified"


def _check_range(n: int, start: int, stop: int) -> tuple[int, list[str]]:
    from .io import to_newick

    U = build_universal(n)
    labels = [str(i) for i in range(1, n + 1)]
    ok = 0
    failures = []
    for tree in itertools.islice(enumerate_trees(labels), start, stop):
        try:
            cert = embed_tree(U, tree)
        except Exception as e:  # every failure is reported, none is fatal
            failures.append(f"{to_newick(tree)} {type(e).__name__}: {e}")
            continue
        if base_tree_violations(U.net, cert.choice, tree):
            failures.append(f"{to_newick(tree)} rejected")
        else:
            ok += 1
    return ok, failures


def check_universal(n: int, jobs: int = 1) -> UniversalityReport:
    """Embed and verify every tree on ``{1..n}``."""
    total = count_trees(n)
    if jobs <= 1 or total < 2 * jobs:
        ok, failures = _check_range(n, 0, total)
        return UniversalityReport(n, total, ok, failures)
    step = -(-total // jobs)
    bounds = [(s, min(s + step, total)) for s in range(0, total, step)]
    ok, failures = 0, []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_check_range, n, a, b) for a, b in bounds]
        for f in futures:
            k, fs = f.result()
            ok += k
            failures += fs
    return UniversalityReport(n, total, ok, failures)


__all__ = [
    "EmbedCertificate",
    "TopEmbedding",
    "UniversalityReport",
    "check_universal",
    "embed_shape_top",
    "embed_tree",
    "required_permutation",
    "scaffold_choice",
]

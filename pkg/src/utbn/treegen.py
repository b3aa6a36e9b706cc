"""Counting, enumerating and sampling rooted binary phylogenetic trees.

Both enumeration and sampling grow trees by leaf insertion: label ``k+1``
goes onto one of the ``2k-1`` edges of a ``k``-leaf tree, the edge above the
root included.  Every tree arises from exactly one insertion sequence.
"""
from __future__ import annotations

import math
import random
from typing import Iterator, Sequence

from .graph import PhyloTree


def count_trees(n: int) -> int:
    """Number of rooted binary phylogenetic trees on ``n`` labelled leaves."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return math.prod(range(3, 2 * n - 2, 2))


def _insertions(t, x):
    # pre-order over the nodes of ``t``; one new tree per edge above a node
    yield (t, x)
    if isinstance(t, tuple):
        a, b = t
        for a2 in _insertions(a, x):
            yield (a2, b)
        for b2 in _insertions(b, x):
            yield (a, b2)


def _nested_to_tree(t) -> PhyloTree:
    edges = []
    labels = {}
    stack = [(t, 0)]
    counter = 1
    while stack:
        node, v = stack.pop()
        if isinstance(node, tuple):
            for child in reversed(node):
                edges.append((v, counter))
                stack.append((child, counter))
                counter += 1
        else:
            labels[v] = node
    return PhyloTree(counter, edges, labels)


def _check_labels(labels: Sequence[str]) -> list[str]:
    labels = [str(x) for x in labels]
    if not labels:
        raise ValueError("at least one label is required")
    if len(set(labels)) != len(labels):
        raise ValueError("labels must be distinct")
    return labels


def enumerate_nested(labels: Sequence[str]) -> Iterator:
    """Like :func:`enumerate_trees` but yields nested tuples of labels."""
    labels = _check_labels(labels)

    def grow(t, k):
        if k == len(labels):
            yield t
            return
        for t2 in _insertions(t, labels[k]):
            yield from grow(t2, k + 1)

    yield from grow(labels[0], 1)


def enumerate_trees(labels: Sequence[str]) -> Iterator[PhyloTree]:
    """Yield every rooted binary tree on ``labels`` exactly once.

    Labels are inserted in the given order and edges scanned in pre-order,
    so the stream order is fixed.
    """
    for t in enumerate_nested(labels):
        yield _nested_to_tree(t)


def random_tree(labels: Sequence[str], seed=None) -> PhyloTree:
    """Uniformly random tree on ``labels``; reproducible for a given seed."""
    labels = _check_labels(labels)
    rng = random.Random(seed)
    # vertex 0.. are internal/leaf nodes; parent[-1] marks the root
    parent = [-1]
    leaf_label = {0: labels[0]}
    for x in labels[1:]:
        u = rng.randrange(len(parent))
        w = len(parent)
        leaf = w + 1
        parent.append(parent[u])
        parent.append(w)
        parent[u] = w
        leaf_label[leaf] = x
    root = parent.index(-1)
    # renumber with the root first
    order = [root] + [v for v in range(len(parent)) if v != root]
    new = {v: i for i, v in enumerate(order)}
    edges = sorted((new[parent[v]], new[v]) for v in range(len(parent)) if parent[v] != -1)
    return PhyloTree(len(parent), edges, {new[v]: lab for v, lab in leaf_label.items()})

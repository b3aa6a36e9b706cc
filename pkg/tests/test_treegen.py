from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from utbn.graph import tree_encoding, validate_network
from utbn.treegen import count_trees, enumerate_nested, enumerate_trees, random_tree


def double_factorial_oracle(n):
    # (2n-3)!! via the closed form (2n-2)! / (2^(n-1) (n-1)!)
    from math import factorial

    if n == 1:
        return 1
    return int(Fraction(factorial(2 * n - 2), 2 ** (n - 1) * factorial(n - 1)))


def labels(n):
    return [str(i) for i in range(1, n + 1)]


def test_count_small_values():
    assert [count_trees(n) for n in range(1, 9)] == [1, 1, 3, 15, 105, 945, 10395, 135135]


@pytest.mark.parametrize("n", range(1, 60))
def test_count_matches_closed_form(n):
    assert count_trees(n) == double_factorial_oracle(n)


def test_count_rejects_zero():
    with pytest.raises(ValueError):
        count_trees(0)


@pytest.mark.parametrize("n", range(1, 8))
def test_enumeration_is_complete_and_distinct(n):
    trees = list(enumerate_trees(labels(n)))
    assert len(trees) == count_trees(n)
    encs = {tree_encoding(t) for t in trees}
    assert len(encs) == len(trees)
    for t in trees:
        assert validate_network(t).ok
        assert t.reticulation_count == 0
        assert t.label_set == frozenset(labels(n))


def test_enumeration_order_is_fixed():
    assert list(enumerate_nested(["1", "2", "3"])) == [(("1", "2"), "3"), (("1", "3"), "2"), ("1", ("2", "3"))]
    assert [tree_encoding(t) for t in enumerate_trees(labels(5))] == [
        tree_encoding(t) for t in enumerate_trees(labels(5))
    ]


def test_enumeration_rejects_bad_labels():
    with pytest.raises(ValueError):
        list(enumerate_trees([]))
    with pytest.raises(ValueError):
        list(enumerate_trees(["1", "1"]))


def test_random_tree_is_reproducible():
    a = random_tree(labels(30), seed=7)
    b = random_tree(labels(30), seed=7)
    assert tree_encoding(a) == tree_encoding(b)
    assert a.children == b.children


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**32))
def test_random_tree_validates(n, seed):
    t = random_tree(labels(n), seed)
    assert validate_network(t).ok
    assert t.reticulation_count == 0
    assert t.label_set == frozenset(labels(n))


def test_random_tree_is_uniform_on_four_leaves():
    counts = Counter(tree_encoding(random_tree(labels(4), seed=s)) for s in range(15000))
    assert len(counts) == 15
    for c in counts.values():
        assert 800 <= c <= 1200
    chi2 = sum((c - 1000) ** 2 / 1000 for c in counts.values())
    # 14 degrees of freedom; 36.12 is the 0.999 quantile
    assert chi2 < 36.12

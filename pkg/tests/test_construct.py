import math
from fractions import Fraction

import pytest

from utbn.analyze import at_most_n_log_n
from utbn.benes import switch_count
from utbn.construct import (
    build_bottom,
    build_caterpillar,
    build_top_scaffold,
    build_universal,
    coord_key,
    cross_count,
    reticulation_slots,
    scaffold_reticulation_slots,
    subdivision_count,
    universal_reticulation_count,
)
from utbn.graph import VertexKind, tree_equal, validate_network, verify_base_tree
from utbn.io import parse_newick


def floor_log2(q: Fraction) -> int:
    # largest k with 2^k <= q, by repeated halving or doubling
    k = 0
    while Fraction(2) ** (k + 1) <= q:
        k += 1
    while Fraction(2) ** k > q:
        k -= 1
    return k


def labels(n):
    return [str(i) for i in range(1, n + 1)]


@pytest.mark.parametrize("i", range(2, 1100))
def test_subdivision_count_oracle(i):
    a = floor_log2(Fraction(i, 2))
    b = floor_log2(Fraction(i + 1, 2))
    assert cross_count(i) == a
    assert reticulation_slots(i) == b
    assert subdivision_count(i) == a + b


def test_subdivision_count_rejects_small():
    with pytest.raises(ValueError):
        subdivision_count(1)


def test_caterpillar_shape():
    assert build_caterpillar(["1"]).num_vertices == 1
    assert tree_equal(build_caterpillar(["1", "2"]), parse_newick("(1,2);"))
    cat = build_caterpillar(labels(4))
    assert tree_equal(cat, parse_newick("(((1,2),3),4);"))
    four = cat.vertex_of_label["4"]
    assert cat.parents[four] == (cat.root,)
    internal = [v for v in range(cat.num_vertices) if cat.children[v]]
    assert len(internal) == 3


def test_scaffold_small_cases():
    s2 = build_top_scaffold(2)
    assert s2.cross_edges == () and s2.path(2) == [] and s2.path(1) == []
    s4 = build_top_scaffold(4)
    assert s4.cross_edges == ((4, 1),)
    assert s4.cross_edge_coords() == [(("v", 4, 2), ("v", 3, 1))]
    assert build_top_scaffold(18).reticulation_slot_total == 32
    # 32 by summing the terms one at a time
    assert sum(floor_log2(Fraction(i + 1, 2)) for i in range(2, 19)) == 32


def test_cross_edges_depend_only_on_path_index():
    small = set(build_top_scaffold(20).cross_edges)
    big = set(build_top_scaffold(70).cross_edges)
    assert small == {(i, j) for i, j in big if i <= 20}


@pytest.mark.parametrize("n", range(2, 300))
def test_every_inner_slot_has_a_cross_edge(n):
    s = build_top_scaffold(n)
    targets = {t for _, t in s.cross_edge_coords()}
    for i in range(1, n):
        for p in range(1, s.path_length(i) + 1, 2):
            assert ("v", i, p) in targets
            j = (p + 1) // 2
            assert 2 * j <= s.path_length(i + 1)
    # slots on the last path receive nothing
    assert not any(t[1] == n for t in targets)


def test_scaffold_network_keeps_last_path_slots():
    net = build_top_scaffold(7).to_network()
    assert net.vertex(("v", 7, 1)) is not None
    assert net.reticulation_count == scaffold_reticulation_slots(6)


def test_scaffold_bound_up_to_4096():
    total = 0
    for n in range(2, 4097):
        total += reticulation_slots(n)
        assert at_most_n_log_n(total, n)
    assert total == scaffold_reticulation_slots(4096)


def test_bottom_counts():
    assert build_bottom(1).reticulation_count == 0
    assert build_bottom(4).reticulation_count == 12
    assert build_bottom(8).reticulation_count == 40
    b = build_bottom(4)
    for w in range(1, 5):
        path = b.path(w)
        ids = [c[1] for c in path]
        assert ids == sorted(ids)
        assert [c[0] for c in path] == ["a", "r"] * (len(path) // 2)


def test_universal_spot_values():
    U1 = build_universal(1)
    assert U1.net.num_vertices == 1 and U1.reticulation_count == 0
    assert build_universal(4).reticulation_count == 13
    assert build_universal(7).reticulation_count == 34
    # A-part of U_4 is 1 slot, B-part 12
    assert universal_reticulation_count(4) == 1 + 2 * 6
    assert universal_reticulation_count(7) == 4 + 2 * 15


def test_universal_rejects_zero():
    with pytest.raises(ValueError):
        build_universal(0)


@pytest.mark.parametrize("n", list(range(2, 129)) + [255, 256, 257, 511, 512, 513, 1000, 1023, 1024])
def test_universal_validates(n):
    U = build_universal(n)
    assert validate_network(U.net).ok
    for r in U.net.reticulations:
        assert U.net.in_degree(r) == 2 and U.net.out_degree(r) == 1
    assert U.reticulation_count == universal_reticulation_count(n)
    assert U.reticulation_count == scaffold_reticulation_slots(n - 1) + 2 * switch_count(n)
    assert U.net.label_set == frozenset(labels(n))


@pytest.mark.slow
def test_universal_validates_every_n_to_1024():
    for n in range(2, 1025):
        U = build_universal(n)
        assert validate_network(U.net).ok
        assert all(U.net.in_degree(r) == 2 for r in U.net.reticulations)
        assert U.reticulation_count == universal_reticulation_count(n)


def test_coordinates_are_ordered():
    U = build_universal(6)
    keys = [coord_key(c) for c in U.net.coords]
    assert keys == sorted(keys)
    assert U.coord(U.net.root) == ("q", 6)


@pytest.mark.parametrize("n", range(1, 65))
def test_vertical_choice_is_the_caterpillar(n):
    U = build_universal(n)
    assert verify_base_tree(U.net, U.vertical_choice(), build_caterpillar(labels(n)))


def test_switch_map_addresses_gadgets():
    U = build_universal(5)
    for sid, (r0, r1) in U.switch_map.items():
        assert U.net.kind(r0) is VertexKind.RETICULATION
        assert U.coord(r0)[:2] == ("r", sid + 1) == U.coord(r1)[:2]


def test_vertical_parent_rejects_non_reticulations():
    U = build_universal(4)
    with pytest.raises(KeyError):
        U.vertical_parent(U.net.root)


def test_four_n_log_n_for_a_few_built_sizes():
    for n in (2, 3, 64, 500):
        r = build_universal(n).reticulation_count
        assert r <= 4 * n * math.log2(n)

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from utbn.benes import (
    apply,
    build_benes,
    check_permutation,
    format_permutation,
    parse_permutation,
    route,
    switch_count,
)


def recursion_oracle(n, memo={}):
    if n not in memo:
        memo[n] = 0 if n == 1 else 1 if n == 2 else recursion_oracle((n + 1) // 2) + recursion_oracle(n // 2) + 2 * (n // 2)
    return memo[n]


def test_switch_counts():
    assert switch_count(1) == 0
    assert switch_count(2) == 1
    assert switch_count(4) == 6
    assert switch_count(5) == 8
    assert switch_count(7) == 15
    assert switch_count(8) == 20


@pytest.mark.parametrize("n", list(range(1, 70)) + [100, 257, 1000])
def test_built_network_matches_recursion(n):
    net = build_benes(n)
    assert net.switch_count == switch_count(n) == recursion_oracle(n)
    assert [s.id for s in net.switches] == list(range(net.switch_count))
    for s in net.switches:
        a, b = s.wires
        assert 0 <= a < b < n


def test_switch_count_is_n_log_n():
    for n in range(2, 4097):
        ceil_log = (n - 1).bit_length()
        assert switch_count(n) <= n * ceil_log


def test_odd_last_wire_bypasses_outer_stages():
    for n in (3, 5, 7, 33):
        net = build_benes(n)
        outer = {w for s in net.entry + net.exit for w in s.wires}
        assert n - 1 not in outer
        assert n - 1 in net.upper.wires
        assert net.upper.n == (n + 1) // 2 and net.lower.n == n // 2


def test_switches_on_wire_are_in_stage_order():
    net = build_benes(8)
    for w in range(8):
        ids = [s.id for s in net.switches_on(w)]
        assert ids == sorted(ids)
        assert len(ids) == 5  # 2*log2(8) - 1


def test_apply_basics():
    net = build_benes(4)
    assert apply(net, {s.id: False for s in net.switches}) == (1, 2, 3, 4)
    two = build_benes(2)
    assert apply(two, {0: True}) == (2, 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 33), st.integers(0, 2**32))
def test_apply_is_bijective(n, seed):
    net = build_benes(n)
    rng = random.Random(seed)
    p = apply(net, {s.id: rng.random() < 0.5 for s in net.switches})
    assert sorted(p) == list(range(1, n + 1))


@pytest.mark.parametrize("n", range(1, 8))
def test_route_all_permutations(n):
    net = build_benes(n)
    for p in itertools.permutations(range(1, n + 1)):
        s = route(net, p)
        assert set(s) == {sw.id for sw in net.switches}
        assert apply(net, s) == p


@pytest.mark.parametrize("n", [8, 16, 33, 100])
def test_route_random_permutations(n):
    net = build_benes(n)
    rng = random.Random(n)
    for _ in range(1000):
        p = list(range(1, n + 1))
        rng.shuffle(p)
        assert apply(net, route(net, p)) == tuple(p)


def test_route_identity_and_reversal():
    net = build_benes(4)
    s = route(net, (1, 2, 3, 4))
    assert not any(s.values())
    assert apply(net, route(net, (4, 1, 3, 2))) == (4, 1, 3, 2)
    big = build_benes(8)
    rev = tuple(range(8, 0, -1))
    assert apply(big, route(big, rev)) == rev


def test_route_is_deterministic():
    net = build_benes(9)
    p = (3, 9, 1, 4, 8, 2, 7, 5, 6)
    assert route(net, p) == route(net, p)


def test_permutation_text():
    assert parse_permutation("4 1 3 2") == (4, 1, 3, 2)
    assert format_permutation((4, 1, 3, 2)) == "4 1 3 2"
    with pytest.raises(ValueError):
        parse_permutation("1 1 2")
    with pytest.raises(ValueError):
        parse_permutation("1 x")
    with pytest.raises(ValueError):
        check_permutation((1, 2), n=3)
    with pytest.raises(ValueError):
        route(build_benes(3), (1, 2))
    with pytest.raises(ValueError):
        build_benes(0)

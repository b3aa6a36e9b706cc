"""Acceptance criteria.  Each test reports one PASS/FAIL line in the
terminal summary under "acceptance criteria"."""
import hashlib
import itertools
import os
import random
import subprocess
import sys
import time

import pytest

from utbn.analyze import at_most_n_log_n, check_time_labels, info_bound, is_stack_free, temporal_labeling
from utbn.benes import apply, build_benes, route, switch_count
from utbn.construct import (
    build_caterpillar,
    build_universal,
    reticulation_slots,
    universal_reticulation_count,
)
from utbn.embed import embed_tree
from utbn.graph import displayed_trees, tree_encoding, validate_network, verify_base_tree
from utbn.treegen import count_trees, enumerate_trees

acceptance = pytest.mark.acceptance


def labels(n):
    return [str(i) for i in range(1, n + 1)]


@acceptance("1 universality: 11465 certificates for n <= 7, zero failures, under 2 minutes")
def test_universality():
    start = time.perf_counter()
    total = failures = 0
    for n in range(1, 8):
        U = build_universal(n)
        seen = 0
        for tree in enumerate_trees(labels(n)):
            seen += 1
            cert = embed_tree(U, tree)
            if not verify_base_tree(U.net, cert.choice, tree):
                failures += 1
        assert seen == count_trees(n)
        total += seen
    elapsed = time.perf_counter() - start
    print(f"universality: {total - failures}/{total} verified in {elapsed:.1f}s")
    assert [count_trees(n) for n in range(1, 8)] == [1, 1, 3, 15, 105, 945, 10395]
    assert total == 11465
    assert failures == 0
    assert elapsed < 120


# built and validated U_n used to cross-check the closed-form count
CROSS_CHECK = list(range(2, 129)) + [255, 256, 257, 511, 512, 513, 1000, 1023, 1024]


@acceptance("2 reticulation bounds: scaffold <= n log n to 4096; info bound <= r(U_n) <= 4 n log n to 1024")
def test_reticulation_bounds():
    scaffold = 0
    for n in range(2, 4097):
        scaffold += reticulation_slots(n)
        assert at_most_n_log_n(scaffold, n), n
    for n in range(2, 1025):
        r = universal_reticulation_count(n)
        assert info_bound(n) <= r, n
        assert at_most_n_log_n(r, n, factor=4), n
    for n in CROSS_CHECK:
        U = build_universal(n)
        assert validate_network(U.net).ok
        assert U.reticulation_count == universal_reticulation_count(n), n
    assert build_universal(4).reticulation_count == 13
    assert build_universal(7).reticulation_count == 34


@acceptance("3 Beneš rearrangeability: all 5913 permutations for n <= 7, 1000 random for n in 8,16,33,100")
def test_benes_rearrangeable():
    cases = 0
    for n in range(1, 8):
        net = build_benes(n)
        for p in itertools.permutations(range(1, n + 1)):
            assert apply(net, route(net, p)) == p
            cases += 1
    assert cases == 5913
    for n in (8, 16, 33, 100):
        net = build_benes(n)
        rng = random.Random(1000 + n)
        for _ in range(1000):
            p = list(range(1, n + 1))
            rng.shuffle(p)
            assert apply(net, route(net, p)) == tuple(p)
    assert switch_count(4) == build_benes(4).switch_count == 6
    assert switch_count(8) == build_benes(8).switch_count == 20


@acceptance("4 oracle cross-check: U_4 displays all 15 trees over 2^13 choices")
def test_bruteforce_oracle():
    U = build_universal(4)
    assert U.reticulation_count == 13
    start = time.perf_counter()
    shown = displayed_trees(U.net, cap=16)
    elapsed = time.perf_counter() - start
    wanted = {tree_encoding(t) for t in enumerate_trees(labels(4))}
    assert len(wanted) == 15
    assert wanted <= shown
    assert elapsed < 30


@acceptance("5 temporal and stack-free: U_n for n <= 64, labels re-checked edge by edge")
def test_temporal_stack_free():
    for n in range(1, 65):
        U = build_universal(n)
        lab = temporal_labeling(U.net)
        assert lab, n
        assert check_time_labels(U.net, lab) == [], n
        assert is_stack_free(U.net), n


@acceptance("6 vertical route: all-vertical choice gives the caterpillar for n <= 64")
def test_vertical_route():
    for n in range(1, 65):
        U = build_universal(n)
        assert verify_base_tree(U.net, U.vertical_choice(), build_caterpillar(labels(n))), n


@acceptance("7 enumeration: |trees| equals the product formula for n <= 8, all distinct")
def test_enumeration():
    for n in range(1, 9):
        encs = [tree_encoding(t) for t in enumerate_trees(labels(n))]
        assert len(encs) == count_trees(n)
        assert len(set(encs)) == len(encs)
    assert count_trees(8) == 135135


def _cli(args, hash_seed):
    env = dict(os.environ, PYTHONHASHSEED=str(hash_seed))
    proc = subprocess.run([sys.executable, "-m", "utbn", *args], capture_output=True, env=env, check=True)
    return hashlib.sha256(proc.stdout).hexdigest()


@acceptance("8 determinism: build, embed and every exporter are byte-identical across runs")
def test_determinism():
    commands = [
        ["build", "-n", "7", "--format", "json"],
        ["build", "-n", "7", "--format", "dot"],
        ["build", "-n", "7", "--format", "enewick"],
        ["embed", "-n", "7", "--tree", "(((1,5),(2,7)),((3,6),4));"],
        ["embed", "-n", "7", "--tree", "(((1,5),(2,7)),((3,6),4));", "--emit", "dot"],
        ["benes", "-n", "7", "--perm", "7 3 1 5 2 6 4"],
        ["stats", "--from", "1", "--to", "12"],
    ]
    for cmd in commands:
        assert _cli(cmd, 1) == _cli(cmd, 2), cmd

import math
import os

import pytest
from hypothesis import given, strategies as st

from coalgmin.oracle import is_fixpoint, naive_minimize, random_coalgebra
from coalgmin.refine import Refiner, minimize
from coalgmin.syntax import flatten, load, parse_file
from coalgmin.term import parse_functor

from conftest import DATA


def enc_of(name):
    with open(os.path.join(DATA, name)) as fh:
        return load(fh.read())[1]


def test_initialize_dfa():
    r = Refiner(enc_of("two_classes.coalg"))
    r.initialize()
    assert r.P.blocks() == [[0, 1], [2]]
    assert list(r.queue) == [1]
    assert r.inert == [False, False, True]


def test_initialize_markov_chain():
    r = Refiner(enc_of("all_equivalent.coalg"))
    r.initialize()
    assert r.P.num_blocks == 1
    assert not r.queue


def test_initialize_empty():
    r = Refiner(flatten(parse_file("P X\n")))
    r.initialize()
    assert r.P.num_blocks == 0 and not r.queue
    assert minimize(flatten(parse_file("P X\n"))).blocks == []


def test_golden_markov_chain():
    assert minimize(enc_of("all_equivalent.coalg"), debug_audits=True).blocks == [[0, 1, 2]]


def test_golden_dfa():
    assert minimize(enc_of("two_classes.coalg"), debug_audits=True).blocks == [[0, 1], [2]]


def test_chain_separates():
    enc = flatten(parse_file("P X\na: {b}\nb: {c}\nc: {}\n"))
    assert minimize(enc, debug_audits=True).blocks == [[0], [1], [2]]


def test_no_edges_one_block():
    enc = flatten(parse_file("P X\na: {}\nb: {}\nc: {}\n"))
    assert minimize(enc).blocks == [[0, 1, 2]]


def test_cancelling_weights_do_not_split():
    # a reaches the equivalent b1, b2 with +1 and -1; its total into their
    # class is 0, exactly like c, which has no edge there at all
    text = "Z^X\na: {b1: 1, b2: -1, d: 1}\nc: {d: 1}\nb1: {}\nb2: {}\nd: {d: 2}\n"
    enc = flatten(parse_file(text))
    blocks = minimize(enc, debug_audits=True).blocks
    assert blocks == naive_minimize(enc)
    assert [0, 1] in blocks


def test_composite_example():
    enc = enc_of("composite.coalg")
    assert minimize(enc, debug_audits=True).blocks == [[0, 1], [2, 3]] == naive_minimize(enc)


FUNCTORS = ["P X", "B X", "DX", "Z^X", "(N,max)^X", "2 x X^{a,b}", "P P X",
            "D(N x P X x B X)", "Z^(4 x X^3)", "(N,max)^(4 x X^3)", "N+^X", "W64^(X + X x X)",
            "R^B X", "P(X + {a}) x X"]


@given(st.sampled_from(FUNCTORS), st.integers(1, 24), st.integers(0, 10**6), st.integers(1, 3))
def test_agrees_with_oracle(f, n, seed, copies):
    enc = flatten(random_coalgebra(parse_functor(f), n, seed, copies=copies))
    result = minimize(enc, debug_audits=True)
    assert result.blocks == naive_minimize(enc)
    assert is_fixpoint(enc, result.blocks)


@given(st.sampled_from(FUNCTORS), st.integers(1, 24), st.integers(0, 10**6), st.integers(1, 3))
def test_singleton_optimization_is_transparent(f, n, seed, copies):
    enc = flatten(random_coalgebra(parse_functor(f), n, seed, copies=copies))
    assert minimize(enc).blocks == minimize(enc, singleton_opt=False, debug_audits=True).blocks


@given(st.sampled_from(FUNCTORS), st.integers(1, 30), st.integers(0, 10**6))
def test_label_volume_is_bounded(f, n, seed):
    enc = flatten(random_coalgebra(parse_functor(f), n, seed, copies=2))
    stats = minimize(enc).stats
    assert stats.label_volume <= 2 * enc.m * math.log2(enc.n + 1)


@given(st.sampled_from(FUNCTORS), st.integers(1, 24), st.integers(0, 10**6))
def test_blocks_are_ordered_and_sorted(f, n, seed):
    enc = flatten(random_coalgebra(parse_functor(f), n, seed, copies=2))
    blocks = minimize(enc).blocks
    assert [b[0] for b in blocks] == sorted(b[0] for b in blocks)
    assert all(b == sorted(b) for b in blocks)
    assert sorted(s for b in blocks for s in b) == list(range(enc.n_original))


def test_sorts_never_share_blocks():
    enc = enc_of("composite.coalg")
    r = Refiner(enc).run()
    for b in range(r.P.num_blocks):
        assert len({enc.sort_of[x] for x in r.P.members(b)}) == 1


def test_stats():
    result = minimize(enc_of("two_classes.coalg"))
    st_ = result.stats
    assert (st_.n, st_.m, st_.initial_blocks, st_.final_blocks) == (3, 6, 2, 2)
    assert st_.final_blocks >= st_.initial_blocks >= 1

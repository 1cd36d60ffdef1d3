import os
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coalgmin.oracle import random_coalgebra
from coalgmin.syntax import (Inj, canon, flatten, format_coalgebra, load, parse_coalgebra,
                             parse_file, quotient)
from coalgmin.term import ParseError, parse_functor

from conftest import DATA


def read(name):
    with open(os.path.join(DATA, name)) as fh:
        return fh.read()


def test_markov_chain_file():
    sym, enc = load(read("all_equivalent.coalg"))
    assert sym.names == ["q", "p", "r"]
    assert sym.values[0] == ((1, Fraction(1, 2)), (2, Fraction(1, 2)))
    assert (enc.n, enc.m) == (3, 5)
    assert sorted(enc.out_label) == sorted(map(Fraction, ["1/2", "1/2", "2/5", "3/5", "1"]))
    enc.audit()


def test_dfa_file():
    sym, enc = load(read("two_classes.coalg"))
    assert (enc.n, enc.m) == (3, 6)
    assert len(enc.plan) == 1
    assert enc.f1[0] == enc.f1[1] != enc.f1[2]
    assert enc.edges(0) == [(0, 1), (1, 2)]


def test_single_state_example():
    t = parse_functor("P({a,b} x R^X)")
    sym = parse_coalgebra(t, ["x: {(a,{x: 2.4}), (a,{}), (b,{x: -8})}"])
    assert len(sym) == 1
    assert len(sym.values[0]) == 3
    enc = flatten(sym)
    assert enc.m == 3 + 3 + 2            # set elements, tuple positions, non-zero weights


def test_empty_body():
    sym = parse_file("P X\n")
    assert len(sym) == 0
    enc = flatten(sym)
    assert (enc.n, enc.m) == (0, 0)


def test_wta_shaped_flattening():
    sym, enc = load("Z^(2 x X^2)\nx: {(0, (x, x)): 3}\n")
    assert enc.n == 2
    assert enc.edges(0) == [(3, 1)]
    assert enc.edges(1) == [(0, 0), (1, 0)]
    assert enc.sort_of == [0, 1]


def test_zero_weights_are_dropped():
    sym, enc = load("Z^X\nx: {x: 0, y: 2}\ny: {}\n")
    assert enc.m == 1
    assert enc.f1[0] == 2


def test_comments_and_blank_lines():
    sym = parse_file("# header\nP X  # the functor\n\n  # nothing\nx: {x} # loop\n")
    assert sym.names == ["x"] and sym.values == [(0,)]


def test_sums_and_exponent_forms():
    t = parse_functor("X^3 + {a}")
    sym = parse_coalgebra(t, ["x: inj 0 (x, y, x)", "y: inj 1 a", "z: inj 0 {2: x, 0: y, 1: z}"])
    assert sym.values == [Inj(0, (0, 1, 0)), Inj(1, "a"), Inj(0, (1, 2, 0))]


def test_parenthesized_injection_key():
    sym = parse_file("Z^(X x X + X)\nx: {(inj 0 (x, x)): 3, inj 1 x: 1}\n")
    assert sym.values[0] == ((Inj(0, (0, 0)), 3), (Inj(1, 0), 1))


@pytest.mark.parametrize("body,message,line", [
    ("x: {y}", "unknown state 'y'", 2),
    ("x: {x}\nx: {}", "duplicate state 'x'", 3),
    ("x: (x)", "expected '{'", 2),
    ("x: {x}}", "trailing input", 2),
    ("nonsense", "expected 'name: value'", 2),
])
def test_errors_pow(body, message, line):
    with pytest.raises(ParseError) as info:
        parse_file("P X\n" + body)
    assert message in str(info.value)
    assert info.value.line == line


@pytest.mark.parametrize("text,message", [
    ("Z^X\nx: {x: 1, x: 2}", "duplicate key"),
    ("DX\nx: {x: 0.5}", "sums to 1/2"),
    ("DX\nx: {x: 1.5, y: -0.5}\ny: {y: 1}", "non-negative"),
    ("N+^X\nx: {x: -1}", "invalid literal"),
    ("X + X\nx: inj 2 x", "injection index"),
    ("X^{a,b}\nx: {a: x}", "missing letters"),
    ("{a,b} x X\nx: (c, x)", "expected one of"),
    ("", "empty input"),
])
def test_errors(text, message):
    with pytest.raises(ParseError) as info:
        parse_file(text)
    assert message in str(info.value)


def test_error_reports_column():
    with pytest.raises(ParseError) as info:
        parse_file("P X\nx: {x, q}\n")
    assert (info.value.line, info.value.col) == (2, 8)


FUNCTORS = ["P X", "B X", "DX", "Z^X", "(N,max)^X", "2 x X^{a,b}", "P P X",
            "D(N x P X x B X)", "Z^(4 x X^3)", "(N,max)^(4 x X^3)", "X^2 + N", "W64^(X + X x X)",
            "Z x Z^({leaf} + {node} x X^2)", "R^B X"]


@given(st.sampled_from(FUNCTORS), st.integers(0, 12), st.integers(0, 10**6))
def test_print_parse_round_trip(f, n, seed):
    t = parse_functor(f)
    sym = random_coalgebra(t, n, seed)
    again = parse_file(format_coalgebra(sym))
    assert again.names == sym.names
    assert [canon(t, v) for v in again.values] == [canon(t, v) for v in sym.values]


@given(st.sampled_from(FUNCTORS), st.integers(0, 12), st.integers(0, 10**6))
def test_flatten_invariants(f, n, seed):
    sym = random_coalgebra(parse_functor(f), n, seed)
    enc = flatten(sym)
    enc.audit()
    assert enc.m == sum(len(enc.edges(x)) for x in range(enc.n))
    assert enc.back_map() == {name: i for i, name in enumerate(sym.names)}
    indeg = [0] * enc.n
    for y in enc.out_target:
        indeg[y] += 1
    assert all(d == 1 for d in indeg[enc.n_original:])
    fingerprints = {}
    for x in range(enc.n):
        fingerprints.setdefault(enc.fingerprint(x), set()).add(enc.sort_of[x])
    assert all(len(s) == 1 for s in fingerprints.values())


def test_quotient_merges_weights():
    sym = parse_file("Z^X\na: {b: 1, c: 2}\nb: {}\nc: {}\n")
    q = quotient(sym, [[0], [1, 2]])
    assert q.names == ["a", "b"]
    assert q.values == [((1, 3),), ()]
    assert format_coalgebra(q) == "Z^X\n\na: {b: 3}\nb: {}\n"


def test_quotient_dedupes_sets():
    sym = parse_file("P X\na: {b, c}\nb: {}\nc: {}\n")
    q = quotient(sym, [[0], [1, 2]])
    assert q.values[0] == (1,)

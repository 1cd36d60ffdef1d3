import pytest
from hypothesis import example, given, strategies as st

from coalgmin import monoid as M
from coalgmin.term import (Bag, ConstMonoid, ConstNat, ConstSet, Dist, Exp, MonoidVal,
                           ParseError, Pow, Product, Sum, Var, format_term, numeric_set,
                           parse_functor, plan_decomposition)


def test_dx_is_dist_of_x():
    assert parse_functor("DX") == Dist(Var())


def test_dfa_functor():
    assert parse_functor("{f,n} x X^{a,b}") == Product((ConstSet(("f", "n")), Exp(Var(), ("a", "b"))))


def test_var():
    assert parse_functor("X") == Var()


def test_wta_shape():
    t = parse_functor("(N,max)^(4 x X^3)")
    assert t == MonoidVal(M.NAT_MAX, Product((ConstSet(numeric_set(4)), Exp(Var(), numeric_set(3)))))
    assert format_term(t) == "(N,max)^(4 x X^3)"


@pytest.mark.parametrize("text,expected", [
    ("X + X x X", Sum((Var(), Product((Var(), Var()))))),
    ("X x X^2", Product((Var(), Exp(Var(), numeric_set(2))))),
    ("P X x X", Product((Pow(Var()), Var()))),
    ("B(X + N)", Bag(Sum((Var(), ConstNat())))),
    ("Z^X x R^X", Product((MonoidVal(M.INT_ADD, Var()), MonoidVal(M.RAT_ADD, Var())))),
    ("N+^X", MonoidVal(M.NAT_ADD, Var())),
    ("W64^P X", MonoidVal(M.WORD64_OR, Pow(Var()))),
    ("Z x Z^X", Product((ConstMonoid(M.INT_ADD), MonoidVal(M.INT_ADD, Var())))),
    ("N+ x N+^X", Product((ConstMonoid(M.NAT_ADD), MonoidVal(M.NAT_ADD, Var())))),
    ("N + X", Sum((ConstNat(), Var()))),
])
def test_precedence(text, expected):
    assert parse_functor(text) == expected


@pytest.mark.parametrize("text,message", [
    ("C^X", "unsupported monoid"),
    ("X x", "unexpected"),
    ("{a,a} x X", "duplicate"),
    ("{1a} x X", "identifier"),
    ("P (X", "expected"),
    ("X $", "unexpected character"),
])
def test_errors(text, message):
    with pytest.raises(ParseError) as info:
        parse_functor(text)
    assert message in str(info.value)
    assert info.value.col is not None


def _terms():
    names = st.lists(st.sampled_from(["a", "b", "c", "go", "stop"]), min_size=1, max_size=3,
                     unique=True).map(tuple)
    leaves = st.one_of(
        st.just(Var()), st.just(ConstNat()),
        names.map(ConstSet),
        st.integers(1, 4).map(lambda k: ConstSet(numeric_set(k))),
        st.sampled_from([M.INT_ADD, M.RAT_ADD, M.NAT_ADD, M.NAT_MAX, M.WORD64_OR]).map(ConstMonoid),
    )
    monoids = st.sampled_from([M.INT_ADD, M.RAT_ADD, M.NAT_ADD, M.NAT_MAX, M.WORD64_OR])

    def extend(inner):
        return st.one_of(
            inner.map(Pow), inner.map(Bag), inner.map(Dist),
            st.tuples(monoids, inner).map(lambda p: MonoidVal(*p)),
            st.lists(inner, min_size=2, max_size=3).map(lambda cs: Product(tuple(cs))),
            st.lists(inner, min_size=2, max_size=3).map(lambda cs: Sum(tuple(cs))),
            st.tuples(inner, st.one_of(names, st.integers(1, 3).map(numeric_set)))
              .map(lambda p: Exp(*p)),
        )
    return st.recursive(leaves, extend, max_leaves=8)


@given(_terms())
@example(Exp(MonoidVal(M.INT_ADD, ConstMonoid(M.INT_ADD)), ("0",)))
@example(Exp(Pow(ConstMonoid(M.NAT_MAX)), ("a",)))
def test_print_parse_round_trip(t):
    printed = format_term(t)
    again = parse_functor(printed)
    assert again == t
    assert format_term(again) == printed


def test_plan_composite():
    plan = plan_decomposition(parse_functor("D(N x P X x B X)"))
    assert plan.describe() == ["Dist", "Poly(N x P X x B X)", "Pow", "Bag"]
    poly = plan.sorts[1]
    assert poly.leaf_sorts == [2, 3]
    assert plan.sorts[2].child_sort == plan.sorts[3].child_sort == plan.original_sort == 0


def test_plan_single_basic():
    assert len(plan_decomposition(parse_functor("P X"))) == 1


def test_plan_wta_shape():
    plan = plan_decomposition(parse_functor("Z^(2 x X^2)"))
    assert [s.kind for s in plan.sorts] == ["monoid", "poly"]
    assert plan.sorts[1].leaf_sorts == [0]


def test_plan_rejects_constant():
    with pytest.raises(ValueError):
        plan_decomposition(parse_functor("{a,b} x N"))


@given(_terms())
def test_plan_is_maximal(t):
    try:
        plan = plan_decomposition(t)
    except ValueError:
        return
    basic = 0

    def count(n):
        nonlocal basic
        if isinstance(n, (Pow, Bag, Dist, MonoidVal)):
            basic += 1
            count(n.child)
        elif isinstance(n, (Product, Sum)):
            for c in n.children:
                count(c)
        elif isinstance(n, Exp):
            count(n.child)
    count(t)
    for s in plan.sorts:
        if s.kind == "poly":
            assert all(plan.sorts[c].kind != "poly" or plan.sorts[c].index == plan.original_sort
                       for c in s.leaf_sorts)
        elif s.child_sort is not None and s.child_sort != plan.original_sort:
            assert s.kind != "poly"
    polys = sum(1 for s in plan.sorts if s.kind == "poly")
    assert len(plan.sorts) == basic + polys

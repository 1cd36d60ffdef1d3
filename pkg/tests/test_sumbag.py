from collections import Counter

import pytest
from hypothesis import given, strategies as st

from coalgmin import monoid as M
from coalgmin.sumbag import InvariantError, SumBag, height_bound

MONOIDS = [M.NAT_MAX, M.INT_ADD, M.WORD64_OR, M.NAT_ADD]

ops = st.lists(st.tuples(st.booleans(), st.integers(1, 12), st.integers(1, 3)), max_size=120)


def expected_total(m, counts):
    acc = m.zero
    for e, k in counts.items():
        acc = m.add(acc, M.scale(m, k, e))
    return acc


@given(st.sampled_from(MONOIDS), ops)
def test_matches_counter(m, script):
    bag = SumBag(m)
    shadow = Counter()
    for insert, e, k in script:
        if insert:
            bag.insert(e, k)
            shadow[e] += k
        else:
            removed = bag.remove(e, k)
            assert removed == min(k, shadow[e])
            shadow[e] -= removed
        shadow += Counter()
        assert bag.total() == expected_total(m, shadow)
    bag.audit()
    assert bag.items() == sorted(shadow.items())
    assert len(bag) == len(shadow)


@given(st.lists(st.integers(1, 10_000), max_size=300))
def test_height_is_logarithmic(keys):
    bag = SumBag(M.NAT_MAX, keys)
    bag.audit()
    assert bag.height() <= height_bound(len(bag))


@given(st.lists(st.integers(1, 9), max_size=30), st.lists(st.integers(1, 9), max_size=30))
def test_subtract_is_truncated_difference(xs, ys):
    bag = SumBag(M.NAT_ADD, xs)
    bag.subtract(ys)
    assert Counter(dict(bag.items())) == Counter(xs) - Counter(ys)
    bag.audit()


def test_strict_remove_raises():
    bag = SumBag(M.NAT_MAX, [3, 5])
    with pytest.raises(InvariantError):
        bag.remove(3, 2, strict=True)
    with pytest.raises(InvariantError):
        bag.subtract([7], strict=True)


def test_zero_is_rejected():
    with pytest.raises(ValueError):
        SumBag(M.INT_ADD).insert(0)


def test_copy_is_independent():
    bag = SumBag(M.INT_ADD, [1, 1, 2])
    twin = bag.copy()
    twin.remove(1)
    assert bag.total() == 4 and twin.total() == 3
    assert bag != twin


def test_idempotent_total():
    bag = SumBag(M.NAT_MAX, [3, 5, 5])
    assert bag.total() == 5
    bag.remove(5, 2)
    assert bag.total() == 3

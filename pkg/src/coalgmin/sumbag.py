"""Bags of non-zero monoid elements with O(1) access to their total.

A bag is stored as a weight-balanced binary search tree (the scheme used by
Haskell's ``Data.Map``, parameters delta=3, ratio=2).  Every node caches the
monoid sum of the subtree below it, so :meth:`SumBag.total` is a field read
and every insertion or removal only recomputes sums along one root path.
"""
from __future__ import annotations

import math

from .monoid import Monoid, scale

DELTA = 3
RATIO = 2


class InvariantError(AssertionError):
    """Raised when an internal consistency check fails."""


class _Node:
    __slots__ = ("key", "mult", "own", "sum", "size", "left", "right")

    def __init__(self, key, mult, own):
        self.key = key
        self.mult = mult
        self.own = own      # scale(mult, key), cached
        self.sum = own
        self.size = 1
        self.left = None
        self.right = None


class SumBag:
    """Multiset over ``monoid`` minus zero with a cached total sum.

    The bag mutates in place; callers that need the old value must
    :meth:`copy` first.
    """

    __slots__ = ("monoid", "root", "_add")

    def __init__(self, monoid: Monoid, items=()):
        self.monoid = monoid
        self.root = None
        self._add = monoid.add
        for e in items:
            self.insert(e, 1)

    @classmethod
    def from_counts(cls, monoid: Monoid, counts) -> "SumBag":
        bag = cls(monoid)
        for e, k in counts.items() if hasattr(counts, "items") else counts:
            bag.insert(e, k)
        return bag

    # -- queries -----------------------------------------------------------

    def total(self):
        root = self.root
        return self.monoid.zero if root is None else root.sum

    def __len__(self):
        root = self.root
        return 0 if root is None else root.size

    def __bool__(self):
        return self.root is not None

    def count(self, e) -> int:
        node = self.root
        while node is not None:
            if e < node.key:
                node = node.left
            elif node.key < e:
                node = node.right
            else:
                return node.mult
        return 0

    def items(self):
        """Sorted ``(key, multiplicity)`` pairs."""
        out = []
        stack = []
        node = self.root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            out.append((node.key, node.mult))
            node = node.right
        return out

    def height(self) -> int:
        def h(node):
            return 0 if node is None else 1 + max(h(node.left), h(node.right))
        return h(self.root)

    def copy(self) -> "SumBag":
        other = SumBag(self.monoid)
        other.root = _clone(self.root)
        return other

    def __eq__(self, other):
        if not isinstance(other, SumBag):
            return NotImplemented
        return self.monoid is other.monoid and self.items() == other.items()

    def __hash__(self):
        return hash(tuple(self.items()))

    def __repr__(self):
        inner = ", ".join(f"{k}:{m}" for k, m in self.items())
        return f"SumBag({{{inner}}})"

    # -- updates -----------------------------------------------------------

    def insert(self, e, k: int = 1) -> "SumBag":
        """Add ``k`` copies of ``e``; returns ``self``."""
        if k <= 0:
            raise ValueError("multiplicity must be positive")
        if e == self.monoid.zero:
            raise ValueError("the zero element cannot be stored in a SumBag")
        self.root = self._insert(self.root, e, k)
        return self

    def remove(self, e, k: int = 1, strict: bool = False) -> int:
        """Remove up to ``k`` copies of ``e`` and return how many were removed.

        With ``strict`` set, removing more copies than present raises
        :class:`InvariantError` instead of truncating.
        """
        have = self.count(e)
        take = min(have, k)
        if strict and take < k:
            raise InvariantError(f"cannot remove {k} x {e!r} from bag holding {have}")
        if take:
            self.root = self._remove(self.root, e, take)
        return take

    def subtract(self, other, strict: bool = False) -> "SumBag":
        """Truncated bag difference, in place.  ``other`` is an iterable of
        elements (repetitions count) or a mapping element -> multiplicity."""
        if hasattr(other, "items") and not isinstance(other, SumBag):
            pairs = other.items()
        elif isinstance(other, SumBag):
            pairs = other.items()
        else:
            counts = {}
            for e in other:
                counts[e] = counts.get(e, 0) + 1
            pairs = counts.items()
        for e, k in pairs:
            self.remove(e, k, strict)
        return self

    # -- tree internals ----------------------------------------------------

    def _fix(self, node):
        left, right = node.left, node.right
        s = node.own
        size = 1
        add = self._add
        if left is not None:
            s = add(left.sum, s)
            size += left.size
        if right is not None:
            s = add(s, right.sum)
            size += right.size
        node.sum = s
        node.size = size
        return node

    def _insert(self, node, e, k):
        if node is None:
            return _Node(e, k, scale(self.monoid, k, e))
        if e < node.key:
            node.left = self._insert(node.left, e, k)
        elif node.key < e:
            node.right = self._insert(node.right, e, k)
        else:
            node.mult += k
            node.own = scale(self.monoid, node.mult, e)
            return self._fix(node)
        return self._balance(node)

    def _remove(self, node, e, k):
        if node is None:
            raise InvariantError(f"{e!r} not in bag")
        if e < node.key:
            node.left = self._remove(node.left, e, k)
        elif node.key < e:
            node.right = self._remove(node.right, e, k)
        else:
            if node.mult > k:
                node.mult -= k
                node.own = scale(self.monoid, node.mult, e)
                return self._fix(node)
            return self._glue(node.left, node.right)
        return self._balance(node)

    def _glue(self, left, right):
        if left is None:
            return right
        if right is None:
            return left
        if left.size > right.size:
            left, top = self._pop_max(left)
        else:
            right, top = self._pop_min(right)
        top.left = left
        top.right = right
        return self._balance(top)

    def _pop_min(self, node):
        if node.left is None:
            rest = node.right
            node.right = None
            return rest, node
        node.left, top = self._pop_min(node.left)
        return self._balance(node), top

    def _pop_max(self, node):
        if node.right is None:
            rest = node.left
            node.left = None
            return rest, node
        node.right, top = self._pop_max(node.right)
        return self._balance(node), top

    def _balance(self, node):
        left, right = node.left, node.right
        ls = 0 if left is None else left.size
        rs = 0 if right is None else right.size
        if ls + rs >= 2:
            if rs > DELTA * ls:
                rl, rr = right.left, right.right
                if (0 if rl is None else rl.size) < RATIO * (0 if rr is None else rr.size):
                    return self._rotate_left(node)
                node.right = self._rotate_right(right)
                return self._rotate_left(node)
            if ls > DELTA * rs:
                ll, lr = left.left, left.right
                if (0 if lr is None else lr.size) < RATIO * (0 if ll is None else ll.size):
                    return self._rotate_right(node)
                node.left = self._rotate_left(left)
                return self._rotate_right(node)
        return self._fix(node)

    def _rotate_left(self, node):
        pivot = node.right
        node.right = pivot.left
        pivot.left = self._fix(node)
        return self._fix(pivot)

    def _rotate_right(self, node):
        pivot = node.left
        node.left = pivot.right
        pivot.right = self._fix(node)
        return self._fix(pivot)

    # -- auditing ----------------------------------------------------------

    def audit(self):
        """Check order, balance, size and cached-sum invariants of the tree."""
        m = self.monoid

        def walk(node, lo, hi):
            if node is None:
                return 0, m.zero
            if node.mult < 1:
                raise InvariantError(f"multiplicity {node.mult} at {node.key!r}")
            if node.key == m.zero:
                raise InvariantError("zero key stored")
            if (lo is not None and not lo < node.key) or (hi is not None and not node.key < hi):
                raise InvariantError(f"search order violated at {node.key!r}")
            ls, lsum = walk(node.left, lo, node.key)
            rs, rsum = walk(node.right, node.key, hi)
            if ls + rs >= 2 and (ls > DELTA * rs or rs > DELTA * ls):
                raise InvariantError(f"unbalanced at {node.key!r}: {ls} vs {rs}")
            if node.size != ls + rs + 1:
                raise InvariantError(f"bad size at {node.key!r}")
            if node.own != scale(m, node.mult, node.key):
                raise InvariantError(f"bad own sum at {node.key!r}")
            expect = m.add(m.add(lsum, node.own), rsum)
            if node.sum != expect:
                raise InvariantError(f"bad cached sum at {node.key!r}")
            return node.size, expect

        walk(self.root, None, None)


def _clone(node):
    if node is None:
        return None
    twin = _Node(node.key, node.mult, node.own)
    twin.sum = node.sum
    twin.size = node.size
    twin.left = _clone(node.left)
    twin.right = _clone(node.right)
    return twin


def height_bound(distinct: int) -> float:
    """Worst-case height of a delta=3 weight-balanced tree with this many keys."""
    return math.log(distinct + 1, 4 / 3) + 1

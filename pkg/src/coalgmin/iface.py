"""Refinement interfaces: the functor-specific part of partition refinement.

An interface works on the encoded form of a state (an F1 value plus a bag of
``(label, target)`` edges) and provides

``init(f1, labels)``
    the weight of the state with respect to the whole state space;
``update(labels, w)``
    given the labels of the edges into a subblock ``S`` of a block ``B`` and
    the weight ``w`` of the state w.r.t. ``B``, returns the triple
    ``(weight w.r.t. S, split value, weight w.r.t. B\\S)``.  The split value
    is the functor applied to the three-valued characteristic map of ``S``
    in ``B``: two states of one block stay together iff their split values
    agree.
``idle_split(w)``
    the split value of a state without edges into ``S``, i.e. the middle
    component of ``update((), w)``, computed without touching ``w``;
``observe(f1, edges, colour)``
    the functor applied to an arbitrary colouring (used by the oracle and
    for post-hoc checks).

All weights, split values and observations are hashable Python values.
``update(..., consume=True)`` may reuse the storage of ``w``; the engine
uses this because it discards the old weight anyway.
"""
from __future__ import annotations

from . import monoid as M
from .sumbag import SumBag


class PowInterface:
    """Finite powerset.  Weight: (has an edge leaving B, number of edges into B)."""
    name = "pow"

    def init(self, f1, labels):
        return (False, len(labels))

    def update(self, labels, w, consume=False):
        h, k = w
        s = len(labels)
        rest = k - s
        return (h or rest > 0, s), (h, rest > 0, s > 0), (h or s > 0, rest)

    def idle_split(self, w):
        return (w[0], w[1] > 0, False)

    def observe(self, f1, edges, colour):
        return tuple(sorted({colour(y) for _, y in edges}))


class BagInterface:
    """Finite multisets.  Weight: (edges leaving B, edges into B)."""
    name = "bag"

    def init(self, f1, labels):
        return (0, len(labels))

    def update(self, labels, w, consume=False):
        o, i = w
        s = len(labels)
        return (o + i - s, s), (o, i - s, s), (o + s, i - s)

    def idle_split(self, w):
        return (w[0], w[1], 0)

    def observe(self, f1, edges, colour):
        return tuple(sorted(colour(y) for _, y in edges))


class GroupInterface:
    """Weights in an abelian group ``g`` (``zero``, ``add``, ``negate``).

    Labels are mapped into the group by ``embed``; this is how a cancellative
    monoid is handled through its group completion.  Weight: (sum of weights
    leaving B, sum of weights into B).
    """
    name = "group"

    def __init__(self, group, embed=None, label_monoid=None):
        self.group = group
        self.embed = embed
        self.label_monoid = label_monoid or group

    def _sum(self, labels):
        g = self.group
        add = g.add
        acc = g.zero
        embed = self.embed
        if embed is None:
            for a in labels:
                acc = add(acc, a)
        else:
            for a in labels:
                acc = add(acc, embed(a))
        return acc

    def init(self, f1, labels):
        return (self.group.zero, self._sum(labels))

    def update(self, labels, w, consume=False):
        g = self.group
        r, b = w
        s = self._sum(labels)
        rest = g.add(b, g.negate(s))
        return (g.add(r, rest), s), (r, rest, s), (g.add(r, s), rest)

    def idle_split(self, w):
        return (w[0], w[1], self.group.zero)

    def observe(self, f1, edges, colour):
        return _weighted_observation(self.label_monoid, edges, colour)


class MonoidInterface:
    """Weights in an arbitrary commutative monoid.

    Weight: (sum of weights leaving B, bag of the weights into B); the bag is
    a :class:`SumBag` so its total is available in constant time.
    """
    name = "monoid"

    def __init__(self, monoid):
        self.monoid = monoid

    def init(self, f1, labels):
        return (self.monoid.zero, SumBag(self.monoid, labels))

    def update(self, labels, w, consume=False):
        m = self.monoid
        r, c = w
        if not consume:
            c = c.copy()
        into_s = SumBag(m, labels)
        c.subtract(into_s, strict=True)
        rest = c.total()
        s = into_s.total()
        return (m.add(r, rest), into_s), (r, rest, s), (m.add(r, s), c)

    def idle_split(self, w):
        return (w[0], w[1].total(), self.monoid.zero)

    def observe(self, f1, edges, colour):
        return _weighted_observation(self.monoid, edges, colour)


class PolyInterface:
    """Polynomial functors; labels are argument positions.

    The constructor shape is the F1 value, so a weight only needs to say
    which positions lead into B: it is a bit mask over positions.  The split
    value is the pair (positions into S, positions into B\\S).
    """
    name = "poly"

    def init(self, f1, labels):
        mask = 0
        for p in labels:
            mask |= 1 << p
        return mask

    def update(self, labels, w, consume=False):
        s = 0
        for p in labels:
            s |= 1 << p
        rest = w & ~s
        return s, (s, rest), rest

    def idle_split(self, w):
        return (0, w)

    def observe(self, f1, edges, colour):
        return (f1, tuple(colour(y) for _, y in sorted(edges, key=lambda e: e[0])))


def _weighted_observation(monoid, edges, colour):
    acc = {}
    add = monoid.add
    for w, y in edges:
        c = colour(y)
        acc[c] = add(acc[c], w) if c in acc else w
    zero = monoid.zero
    return tuple(sorted((c, w) for c, w in acc.items() if w != zero))


def interface_for_sort(sort, force_generic_monoid: bool = False):
    """Pick the interface for one sort of a decomposition plan."""
    kind = sort.kind
    if kind == "pow":
        return PowInterface()
    if kind == "bag":
        return BagInterface()
    if kind == "poly":
        return PolyInterface()
    if kind == "dist":
        if force_generic_monoid:
            return MonoidInterface(M.RAT_ADD)
        return GroupInterface(M.RAT_ADD)
    if kind == "monoid":
        m = sort.monoid
        if force_generic_monoid:
            return MonoidInterface(m)
        if m.is_group:
            return GroupInterface(m)
        if m.is_cancellative:
            g = M.GrothendieckGroup(m)
            return GroupInterface(g, embed=g.embed, label_monoid=m)
        return MonoidInterface(m)
    raise ValueError(f"no interface for sort kind {kind!r}")


def interfaces_for(plan, force_generic_monoid: bool = False):
    return [interface_for_sort(s, force_generic_monoid) for s in plan.sorts]

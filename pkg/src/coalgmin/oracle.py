"""Reference machinery: a naive minimizer, random instances, and a direct
check of the init/update coherence condition of every interface.

Nothing here shares code with the refinement loop; the weight maps used by
:func:`check_coherence` are written out from their definitions.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from . import monoid as M
from .iface import (BagInterface, GroupInterface, MonoidInterface, PolyInterface,
                    PowInterface, interfaces_for)
from .sumbag import SumBag
from .syntax import Inj, SymbolicCoalgebra, canon
from .term import (Bag, ConstMonoid, ConstNat, ConstSet, Dist, Exp, MonoidVal, Pow,
                   Product, Sum, Var)


# -- naive minimization ----------------------------------------------------------

def naive_colouring(enc, ifaces=None):
    """Stable colouring of all (flattened) states by iterated observation.

    Returns ``(colours, rounds)``.
    """
    if ifaces is None:
        ifaces = interfaces_for(enc.plan)
    ids = {}
    colour = [ids.setdefault(enc.fingerprint(x), len(ids)) for x in range(enc.n)]
    count = len(ids)
    rounds = 0
    if count == enc.n:
        return colour, rounds
    while True:
        ids = {}
        look = colour.__getitem__
        fresh = []
        for x in range(enc.n):
            obs = ifaces[enc.sort_of[x]].observe(enc.f1[x], enc.edges(x), look)
            fresh.append(ids.setdefault((colour[x], obs), len(ids)))
        rounds += 1
        if len(ids) == count:
            return colour, rounds
        colour, count = fresh, len(ids)


def naive_minimize(enc, ifaces=None):
    """Blocks of original states, ordered like :func:`refine.minimize`."""
    colour, _ = naive_colouring(enc, ifaces)
    blocks = {}
    for x in range(enc.n_original):
        blocks.setdefault(colour[x], []).append(x)
    return sorted(blocks.values(), key=lambda b: b[0])


def is_fixpoint(enc, blocks, ifaces=None) -> bool:
    """True iff, colouring original states by ``blocks`` and intermediate
    states by their naive classes, each block has a single observation."""
    if ifaces is None:
        ifaces = interfaces_for(enc.plan)
    colour, _ = naive_colouring(enc, ifaces)
    offset = max(colour, default=0) + 1
    for i, members in enumerate(blocks):
        for x in members:
            colour[x] = offset + i
    look = colour.__getitem__
    for members in blocks:
        seen = {ifaces[enc.sort_of[x]].observe(enc.f1[x], enc.edges(x), look) for x in members}
        if len(seen) > 1:
            return False
    return True


# -- random coalgebras -----------------------------------------------------------

WEIGHT_POOLS = {
    "Z": [-2, -1, 1, 2, 3],
    "R": [Fraction(-1, 2), Fraction(1, 2), Fraction(1), Fraction(3, 2)],
    "N+": [1, 2, 3],
    "(N,max)": [1, 2, 3, 4],
    "W64": [0x1, 0x2, 0x4, 0x3],
    "2": [1],
}


class _Generator:
    def __init__(self, n, rng, max_out, zero_rate):
        self.n = n
        self.rng = rng
        self.max_out = max_out
        self.zero_rate = zero_rate

    def value(self, t):
        rng = self.rng
        if isinstance(t, Var):
            return rng.randrange(self.n)
        if isinstance(t, Product):
            return tuple(self.value(c) for c in t.children)
        if isinstance(t, Sum):
            i = rng.randrange(len(t.children))
            return Inj(i, self.value(t.children[i]))
        if isinstance(t, Exp):
            return tuple(self.value(t.child) for _ in t.alphabet)
        if isinstance(t, ConstSet):
            return rng.choice(t.symbols)
        if isinstance(t, ConstNat):
            return rng.randrange(3)
        if isinstance(t, ConstMonoid):
            return rng.choice(WEIGHT_POOLS[t.monoid.name] + [t.monoid.zero])
        if isinstance(t, (Pow, Bag)):
            items = [self.value(t.child) for _ in range(rng.randint(0, self.max_out))]
            return canon(t, items)
        if isinstance(t, MonoidVal):
            pool = WEIGHT_POOLS[t.monoid.name]
            keys = self.distinct(t.child, rng.randint(0, self.max_out))
            items = []
            for k in keys:
                w = t.monoid.zero if rng.random() < self.zero_rate else rng.choice(pool)
                items.append((k, w))
            return tuple(items)
        if isinstance(t, Dist):
            keys = self.distinct(t.child, rng.randint(1, self.max_out))
            raw = [rng.randint(1, 3) for _ in keys]
            total = sum(raw)
            return tuple((k, Fraction(r, total)) for k, r in zip(keys, raw))
        raise TypeError(f"unknown term node {t!r}")

    def distinct(self, t, k):
        keys = {}
        for _ in range(4 * k):
            if len(keys) >= k:
                break
            v = canon(t, self.value(t))
            keys.setdefault(v, None)
        return list(keys)


def _shift(t, v, f):
    """Replace every state reference ``s`` by ``f(s)`` without canonicalizing."""
    if isinstance(t, Var):
        return f(v)
    if isinstance(t, (ConstSet, ConstNat, ConstMonoid)):
        return v
    if isinstance(t, Product):
        return tuple(_shift(c, x, f) for c, x in zip(t.children, v))
    if isinstance(t, Sum):
        return Inj(v.index, _shift(t.children[v.index], v.value, f))
    if isinstance(t, Exp):
        return tuple(_shift(t.child, x, f) for x in v)
    if isinstance(t, (Pow, Bag)):
        return tuple(_shift(t.child, x, f) for x in v)
    return tuple((_shift(t.child, k, f), w) for k, w in v)


def random_coalgebra(t, n, seed=0, max_out=3, zero_rate=0.1, copies=1):
    """Random coalgebra for term ``t`` with ``n`` states, reproducible by seed.

    With ``copies > 1`` a base coalgebra of ``ceil(n / copies)`` states is
    drawn and replicated; every state reference in a replica points to a
    random replica of the referenced state.  The replicas of a state are
    therefore behaviourally equivalent, which guarantees non-trivial blocks.
    """
    rng = random.Random(seed)
    base = -(-n // copies) if n else 0
    gen = _Generator(max(base, 1), rng, max_out, zero_rate)
    base_values = [gen.value(t) for _ in range(base)]

    def replica(s):
        # state s + base*r exists for r < number of replicas of s
        return s + base * rng.randrange((n - 1 - s) // base + 1)

    values = []
    for i in range(n):
        v = base_values[i % base]
        if copies > 1:
            v = _shift(t, v, replica)
        values.append(v)
    names = [f"s{i}" for i in range(n)]
    return SymbolicCoalgebra(t, names, values)


# -- coherence -------------------------------------------------------------------

@dataclass
class CoherenceReport:
    interface: str
    trials: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __str__(self):
        status = "ok" if self.ok else f"{len(self.failures)} failures"
        return f"{self.interface}: {self.trials} trials, {status}"


def _sum(m, values):
    acc = m.zero
    for v in values:
        acc = m.add(acc, v)
    return acc


def _grothendieck(m):
    if m.is_group:
        return m, (lambda a: a)
    g = M.GrothendieckGroup(m)
    return g, g.embed


class _Definitions:
    """Weight maps and split values computed straight from their definitions,
    for an encoded state given as a list of ``(label, target)`` edges."""

    def __init__(self, kind, m=None):
        self.kind = kind
        self.m = m
        if kind == "group":
            self.g, self.embed = _grothendieck(m)

    def weight(self, edges, B):
        inside = [lab for lab, y in edges if y in B]
        outside = [lab for lab, y in edges if y not in B]
        if self.kind == "pow":
            return (len(outside) >= 1, len(inside))
        if self.kind == "bag":
            return (len(outside), len(inside))
        if self.kind == "group":
            g, e = self.g, self.embed
            return (_sum(g, map(e, outside)), _sum(g, map(e, inside)))
        if self.kind == "monoid":
            return (_sum(self.m, outside), tuple(sorted(Counter(inside).items())))
        if self.kind == "poly":
            return sum(1 << p for p, y in edges if y in B)
        raise ValueError(self.kind)

    def split(self, edges, S, B):
        """F applied to the map sending S to 2, B\\S to 1 and the rest to 0."""
        chi = lambda y: 2 if y in S else (1 if y in B else 0)
        parts = {0: [], 1: [], 2: []}
        for lab, y in edges:
            parts[chi(y)].append(lab)
        if self.kind == "pow":
            return (bool(parts[0]), bool(parts[1]), bool(parts[2]))
        if self.kind == "bag":
            return (len(parts[0]), len(parts[1]), len(parts[2]))
        if self.kind == "group":
            g, e = self.g, self.embed
            return tuple(_sum(g, map(e, parts[c])) for c in (0, 1, 2))
        if self.kind == "monoid":
            return tuple(_sum(self.m, parts[c]) for c in (0, 1, 2))
        if self.kind == "poly":
            return (sum(1 << p for p in parts[2]), sum(1 << p for p in parts[1]))
        raise ValueError(self.kind)


def _plain(w):
    """Comparable form of an interface weight."""
    if isinstance(w, tuple) and len(w) == 2 and isinstance(w[1], SumBag):
        return (w[0], tuple(w[1].items()))
    return w


def interface_kind(iface):
    if isinstance(iface, PowInterface):
        return "pow", None
    if isinstance(iface, BagInterface):
        return "bag", None
    if isinstance(iface, GroupInterface):
        return "group", iface.label_monoid
    if isinstance(iface, MonoidInterface):
        return "monoid", iface.monoid
    if isinstance(iface, PolyInterface):
        return "poly", None
    raise TypeError(f"unknown interface {iface!r}")


def _random_state(kind, m, rng, universe, max_edges):
    k = rng.randint(0, max_edges)
    if kind == "pow":
        targets = rng.sample(range(universe), min(k, universe))
        return [(None, y) for y in targets]
    if kind == "bag":
        return [(None, rng.randrange(universe)) for _ in range(k)]
    if kind == "poly":
        return [(p, rng.randrange(universe)) for p in range(k)]
    pool = WEIGHT_POOLS[m.name]
    targets = rng.sample(range(universe), min(k, universe))
    return [(rng.choice(pool), y) for y in targets]


def check_coherence(iface, trials=1000, seed=0, universe=8, max_edges=7):
    """Check init/update of ``iface`` against the definitional weight maps on
    ``trials`` random (state, S ⊆ B ⊆ X) triples."""
    kind, m = interface_kind(iface)
    name = kind if m is None else f"{kind}[{m.name}]"
    defs = _Definitions(kind, m)
    rng = random.Random(seed)
    report = CoherenceReport(name, trials)
    X = set(range(universe))
    for trial in range(trials):
        edges = _random_state(kind, m, rng, universe, max_edges)
        B = {x for x in X if rng.random() < 0.6}
        S = {x for x in B if rng.random() < 0.5}
        labels_all = [lab for lab, _ in edges]
        labels_s = [lab for lab, y in edges if y in S]
        f1 = None
        got_init = _plain(iface.init(f1, labels_all))
        want_init = defs.weight(edges, X)
        wB = _weight_from_definition(iface, kind, edges, B)
        ws, v3, wrest = iface.update(labels_s, wB)
        got = (_plain(ws), v3, _plain(wrest))
        want = (defs.weight(edges, S), defs.split(edges, S, B), defs.weight(edges, B - S))
        idle = iface.idle_split(wB)
        want_idle = defs.split(edges, set(), B)
        problems = []
        if got_init != want_init:
            problems.append(("init", got_init, want_init))
        if got != want:
            problems.append(("update", got, want))
        if idle != want_idle:
            problems.append(("idle_split", idle, want_idle))
        if _plain(wB) != defs.weight(edges, B):
            problems.append(("weight(B)", _plain(wB), defs.weight(edges, B)))
        if problems:
            report.failures.append({"trial": trial, "edges": edges, "B": sorted(B),
                                    "S": sorted(S), "problems": problems})
    return report


def _weight_from_definition(iface, kind, edges, B):
    """The stored weight for B, in the interface's own representation."""
    if kind == "monoid":
        inside = [lab for lab, y in edges if y in B]
        outside = [lab for lab, y in edges if y not in B]
        return (_sum(iface.monoid, outside), SumBag(iface.monoid, inside))
    return _Definitions(kind, iface.label_monoid if kind == "group" else None).weight(edges, B)


def coherence_targets():
    """Every interface/monoid combination the engine can select."""
    out = [PowInterface(), BagInterface(), PolyInterface()]
    for m in (M.INT_ADD, M.RAT_ADD):
        out.append(GroupInterface(m))
    g = M.GrothendieckGroup(M.NAT_ADD)
    out.append(GroupInterface(g, embed=g.embed, label_monoid=M.NAT_ADD))
    for m in (M.NAT_MAX, M.WORD64_OR, M.BOOL_OR, M.NAT_ADD, M.INT_ADD, M.RAT_ADD):
        out.append(MonoidInterface(m))
    return out


# -- weighted tree automata --------------------------------------------------------

def backward_bisimulation(wta, ignore_outputs=False):
    """Coarsest backward bisimulation of a WTA, by direct fixpoint iteration.

    Two states are related iff they agree on outputs (unless ignored) and,
    for every symbol and every tuple of classes, the summed weights of
    transitions from tuples in those classes into them coincide.
    """
    m = wta.monoid
    n = len(wta.states)
    incoming = [[] for _ in range(n)]
    for sym, sources, target, w in wta.transitions:
        incoming[target].append((sym, sources, w))
    if ignore_outputs:
        colour = [0] * n
    else:
        ids = {}
        colour = [ids.setdefault(wta.outputs[x], len(ids)) for x in range(n)]
    count = len(set(colour))
    while True:
        ids = {}
        fresh = []
        for x in range(n):
            acc = {}
            for sym, sources, w in incoming[x]:
                key = (sym, tuple(colour[s] for s in sources))
                acc[key] = m.add(acc[key], w) if key in acc else w
            sig = tuple(sorted((k, w) for k, w in acc.items() if w != m.zero))
            fresh.append(ids.setdefault((colour[x], sig), len(ids)))
        if len(ids) == count:
            break
        colour, count = fresh, len(ids)
    blocks = {}
    for x in range(n):
        blocks.setdefault(colour[x], []).append(x)
    return sorted(blocks.values(), key=lambda b: b[0])

"""Weighted tree automata as coalgebras.

A (bottom-up) WTA over a commutative monoid has states, a ranked alphabet,
transitions ``f(x1, ..., xk) -> x`` carrying non-zero weights, and an
output weight per state.  Reading the transitions backwards, state ``x``
maps every term ``f(x1, ..., xk)`` to the weight of the transition into
``x``; with the output weight in front this is a coalgebra for the functor
``M x M^(Σ)``, where ``Σ`` is the polynomial functor of the alphabet.
Behavioural equivalence of that coalgebra is backward bisimilarity.

Text format::

    wta <monoid> f/2 g/1 a/0
    states q0 q1 q2              # optional; fixes the state order
    f(q0, q1) -> q2 : 3
    a -> q0 : 1                  # nullary symbols may omit the parentheses
    out q2 : 1                   # unlisted outputs are 0

``<monoid>`` is one of ``Z``, ``R``, ``N+``, ``(N,max)``, ``W64`` or ``2``.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import monoid as M
from .refine import minimize
from .syntax import Inj, SymbolicCoalgebra, flatten
from .term import (ConstMonoid, ConstSet, Exp, MonoidVal, ParseError, Pow, Product,
                   Sum, Var, numeric_set)


@dataclass
class WTA:
    monoid: M.Monoid
    symbols: list                       # [(name, arity)]
    states: list                        # state names
    outputs: list = None                # output weight per state
    transitions: list = field(default_factory=list)   # (symbol index, sources, target, weight)

    def __post_init__(self):
        if self.outputs is None:
            self.outputs = [self.monoid.zero] * len(self.states)

    @property
    def rank(self) -> int:
        return max((a for _, a in self.symbols), default=0)

    @property
    def k(self) -> int:
        return len(self.transitions)

    def validate(self):
        if len(self.outputs) != len(self.states):
            raise ValueError("one output weight per state expected")
        n = len(self.states)
        seen = set()
        for sym, sources, target, w in self.transitions:
            name, arity = self.symbols[sym]
            if len(sources) != arity:
                raise ValueError(f"{name} has arity {arity}, got {len(sources)} arguments")
            if not all(0 <= s < n for s in sources) or not 0 <= target < n:
                raise ValueError(f"transition {name}{sources} -> {target} mentions unknown states")
            key = (sym, tuple(sources), target)
            if key in seen:
                raise ValueError(f"duplicate transition {name}{tuple(sources)} -> {target}")
            seen.add(key)
            if w == self.monoid.zero:
                raise ValueError("transition weights must be non-zero")
        return self


# -- coalgebra view ----------------------------------------------------------

def arity_groups(symbols):
    """Symbol indices grouped by arity, groups in order of first appearance."""
    groups = {}
    for i, (_, a) in enumerate(symbols):
        groups.setdefault(a, []).append(i)
    return list(groups.items())


def signature_term(symbols):
    """Polynomial term for the alphabet: one summand ``{f,g} x X^k`` per
    arity ``k`` (just ``{a,b}`` for constants, no sum for a single arity)."""
    if not symbols:
        raise ValueError("empty alphabet")
    summands = []
    for arity, members in arity_groups(symbols):
        names = ConstSet(tuple(symbols[i][0] for i in members))
        summands.append(names if arity == 0 else Product((names, Exp(Var(), numeric_set(arity)))))
    return summands[0] if len(summands) == 1 else Sum(tuple(summands))


def wta_term(w: WTA, ignore_outputs=False):
    sigma = signature_term(w.symbols)
    if w.monoid is M.BOOL_OR:
        body, out = Pow(sigma), ConstSet(numeric_set(2))
    else:
        body, out = MonoidVal(w.monoid, sigma), ConstMonoid(w.monoid)
    return body if ignore_outputs else Product((out, body))


def wta_to_coalgebra(w: WTA, ignore_outputs=False) -> SymbolicCoalgebra:
    """Coalgebra of ``w``: state ``x`` sends ``f(x1..xk)`` to the weight of
    ``f(x1..xk) -> x``, paired with its output unless ``ignore_outputs``."""
    t = wta_term(w, ignore_outputs)
    groups = arity_groups(w.symbols)
    where = {}
    for g, (arity, members) in enumerate(groups):
        for i in members:
            where[i] = (g, arity)
    wrap = len(groups) > 1
    incoming = [[] for _ in w.states]
    for sym, sources, target, weight in w.transitions:
        name = w.symbols[sym][0]
        g, arity = where[sym]
        if len(sources) != arity:
            raise ValueError(f"{name} has arity {arity}, got {len(sources)} arguments")
        term = name if arity == 0 else (name, tuple(sources))
        if wrap:
            term = Inj(g, term)
        incoming[target].append((term, weight))
    boolean = w.monoid is M.BOOL_OR
    values = []
    for x, edges in enumerate(incoming):
        body = tuple(term for term, _ in edges) if boolean else tuple(edges)
        if ignore_outputs:
            values.append(body)
        else:
            out = str(int(w.outputs[x])) if boolean else w.outputs[x]
            values.append((out, body))
    return SymbolicCoalgebra(t, list(w.states), values)


def minimize_wta(w: WTA, ignore_outputs=False, **opts):
    """Backward-bisimilarity classes of ``w`` (state indices); see
    :func:`refine.minimize` for the options."""
    enc = flatten(wta_to_coalgebra(w, ignore_outputs))
    return minimize(enc, **opts)


# -- text format -----------------------------------------------------------------

_HEADER = re.compile(r"\s*wta\s+(\(\s*N\s*,\s*max\s*\)|\S+)(.*)$")
_SYMBOL = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)/(\d+)$")
_TRANS = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(([^()]*)\))?\s*->\s*"
                    r"([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(\S+)\s*$")
_OUT = re.compile(r"\s*out\s+([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(\S+)\s*$")
_STATES = re.compile(r"\s*states\b(.*)$")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


def is_wta_text(text: str) -> bool:
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            return bool(_HEADER.match(line))
    return False


def parse_wta(text: str) -> WTA:
    lines = [(i, raw.split("#", 1)[0]) for i, raw in enumerate(text.splitlines(), 1)]
    lines = [(i, s) for i, s in lines if s.strip()]
    if not lines:
        raise ParseError("empty input: expected a 'wta' header", 1)
    lineno, head = lines[0]
    m = _HEADER.match(head)
    if not m:
        raise ParseError("expected 'wta <monoid> <symbol>/<arity> ...'", lineno, 1)
    token = re.sub(r"\s+", "", m.group(1))
    if token not in M.MONOIDS:
        raise ParseError(f"unknown monoid {token!r}", lineno, m.start(1) + 1)
    monoid = M.MONOIDS[token]
    symbols = []
    sym_index = {}
    for item in m.group(2).split():
        s = _SYMBOL.match(item)
        if not s:
            raise ParseError(f"bad symbol declaration {item!r}", lineno)
        if s.group(1) in sym_index:
            raise ParseError(f"symbol {s.group(1)!r} declared twice", lineno)
        sym_index[s.group(1)] = len(symbols)
        symbols.append((s.group(1), int(s.group(2))))
    if not symbols:
        raise ParseError("the alphabet is empty", lineno)

    states = []
    state_index = {}

    def state(name, lineno):
        if name not in state_index:
            if fixed:
                raise ParseError(f"unknown state {name!r}", lineno)
            state_index[name] = len(states)
            states.append(name)
        return state_index[name]

    def weight(text, lineno):
        try:
            return M.parse_literal(monoid, text)
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None

    fixed = False
    body = lines[1:]
    if body:
        sm = _STATES.match(body[0][1])
        if sm:
            for name in sm.group(1).split():
                if not _IDENT.match(name):
                    raise ParseError(f"bad state name {name!r}", body[0][0])
                if name in state_index:
                    raise ParseError(f"state {name!r} listed twice", body[0][0])
                state(name, body[0][0])
            fixed = True
            body = body[1:]

    transitions = {}
    outputs = {}
    for lineno, line in body:
        o = _OUT.match(line)
        if o:
            x = state(o.group(1), lineno)
            if x in outputs:
                raise ParseError(f"second output for {o.group(1)!r}", lineno)
            outputs[x] = weight(o.group(2), lineno)
            continue
        t = _TRANS.match(line)
        if not t:
            raise ParseError("expected 'f(x1, ..., xk) -> x : weight' or 'out x : weight'", lineno)
        name = t.group(1)
        if name not in sym_index:
            raise ParseError(f"undeclared symbol {name!r}", lineno)
        sym = sym_index[name]
        args = [a.strip() for a in t.group(2).split(",")] if t.group(2) and t.group(2).strip() else []
        if len(args) != symbols[sym][1]:
            raise ParseError(f"{name} has arity {symbols[sym][1]}, got {len(args)} arguments", lineno)
        for a in args:
            if not _IDENT.match(a):
                raise ParseError(f"bad state name {a!r}", lineno)
        sources = tuple(state(a, lineno) for a in args)
        target = state(t.group(3), lineno)
        key = (sym, sources, target)
        if key in transitions:
            raise ParseError("duplicate transition", lineno)
        transitions[key] = weight(t.group(4), lineno)

    out = [outputs.get(x, monoid.zero) for x in range(len(states))]
    trans = [(s, src, tgt, w) for (s, src, tgt), w in transitions.items() if w != monoid.zero]
    return WTA(monoid, symbols, states, out, trans)


def format_wta(w: WTA) -> str:
    fmt = lambda a: M.format_literal(w.monoid, a)
    lines = ["wta " + w.monoid.name + " " + " ".join(f"{s}/{a}" for s, a in w.symbols),
             "states " + " ".join(w.states)]
    for sym, sources, target, weight in w.transitions:
        args = ", ".join(w.states[s] for s in sources)
        lines.append(f"{w.symbols[sym][0]}({args}) -> {w.states[target]} : {fmt(weight)}")
    for x, o in enumerate(w.outputs):
        if o != w.monoid.zero:
            lines.append(f"out {w.states[x]} : {fmt(o)}")
    return "\n".join(lines) + "\n"


# -- random instances ----------------------------------------------------------------

def weight_pool(m: M.Monoid, size: int, rng: random.Random):
    """``size`` distinct non-zero elements of ``m`` (fewer if ``m`` is small)."""
    if m is M.BOOL_OR:
        return [1]
    if m is M.WORD64_OR:
        draw = lambda: rng.getrandbits(64) or 1
    elif m is M.INT_ADD:
        draw = lambda: rng.choice((-1, 1)) * rng.randint(1, 10 * size)
    elif m is M.RAT_ADD:
        draw = lambda: Fraction(rng.randint(1, 10 * size), rng.randint(1, 8))
    else:
        draw = lambda: rng.randint(1, 10 * size)
    pool = {}
    while len(pool) < size:
        pool.setdefault(draw(), None)
    return list(pool)


def default_symbols(count: int, rank: int):
    return [(f"f{i}", rank) for i in range(count)]


def _random_outputs(m, n, pool, rng):
    choices = pool + [m.zero]
    return [rng.choice(choices) for _ in range(n)]


def random_wta(n, symbols, monoid, transitions_per_state=50, max_distinct_weights=50,
               seed=0, mixed_rank=False, outputs=True) -> WTA:
    """Random WTA with ``transitions_per_state`` transitions into every state.

    Only symbols of maximal rank are used unless ``mixed_rank`` is set.  Keys
    ``f(x1..xk)`` are distinct per target; if fewer keys exist than requested,
    every key is used once.
    """
    if n < 1:
        raise ValueError("need at least one state")
    rng = random.Random(seed)
    pool = weight_pool(monoid, max_distinct_weights, rng)
    rank = max(a for _, a in symbols)
    usable = [i for i, (_, a) in enumerate(symbols) if mixed_rank or a == rank]
    space = sum(n ** symbols[i][1] for i in usable)
    per_state = min(transitions_per_state, space)
    transitions = []
    for x in range(n):
        keys = set()
        while len(keys) < per_state:
            sym = rng.choice(usable)
            key = (sym, tuple(rng.randrange(n) for _ in range(symbols[sym][1])))
            if key not in keys:
                keys.add(key)
                transitions.append((sym, key[1], x, rng.choice(pool)))
    outs = _random_outputs(monoid, n, pool, rng) if outputs else None
    return WTA(monoid, list(symbols), [f"q{i}" for i in range(n)], outs, transitions)


def dense_random_wta(n, symbols, monoid, zero_probability=0.7, seed=0,
                     max_distinct_weights=50, cap=1_000_000) -> WTA:
    """Every possible transition is present with probability
    ``1 - zero_probability``, its weight uniform from the pool."""
    size = n * sum(n ** a for _, a in symbols)
    if size > cap:
        raise ValueError(f"{size} candidate transitions exceed the cap of {cap}")
    rng = random.Random(seed)
    pool = weight_pool(monoid, max_distinct_weights, rng)
    transitions = []
    for x in range(n):
        for sym, (_, arity) in enumerate(symbols):
            for sources in itertools.product(range(n), repeat=arity):
                if rng.random() >= zero_probability:
                    transitions.append((sym, sources, x, rng.choice(pool)))
    outs = _random_outputs(monoid, n, pool, rng)
    return WTA(monoid, list(symbols), [f"q{i}" for i in range(n)], outs, transitions)

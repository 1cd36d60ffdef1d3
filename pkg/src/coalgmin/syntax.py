"""Coalgebra files: parsing, printing, quotienting and flattening.

A file consists of a functor line followed by one ``name: value`` line per
state.  Values follow the shape of the functor term:

=================  =======================================================
term               value
=================  =======================================================
``X``              a declared state name
``T1 x ... x Tn``  ``(t1, ..., tn)``
``T1 + ... + Tn``  ``inj i t`` with ``0 <= i < n``
``P T``, ``B T``   ``{t1, ..., tn}``
``M^T``, ``D T``   ``{t1: m1, ..., tn: mn}`` (absent keys weigh 0)
``T^{a,b}``        ``{a: t, b: t}``; for ``T^n`` also ``(t1, ..., tn)``
constants          a symbol of the set, a natural (``N``), a monoid literal
=================  =======================================================

``#`` starts a comment; blank lines are skipped.
"""
from __future__ import annotations

import re
from collections import namedtuple
from dataclasses import dataclass, field
from fractions import Fraction

from . import monoid as M
from .term import (Bag, ConstMonoid, ConstNat, ConstSet, Dist, Exp, MonoidVal,
                   ParseError, Pow, Product, Sum, Var, format_term, is_leaf,
                   leaf_count, parse_functor, plan_decomposition, poly_leaves)

Inj = namedtuple("Inj", "index value")

_NAME = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*:")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"[+-]?(?:0[xX][0-9a-fA-F]+|\d+(?:\.\d+)?(?:/\d+)?)")


@dataclass
class SymbolicCoalgebra:
    term: object
    names: list
    values: list

    def __len__(self):
        return len(self.names)

    def index(self):
        return {name: i for i, name in enumerate(self.names)}


# -- value tokenizer ---------------------------------------------------------

def _tokenize(text, line, offset):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "(){},:":
            toks.append((c, c, offset + i))
            i += 1
            continue
        m = _NUMBER.match(text, i)
        if m and (c not in "+-" or m.end() > i + 1):
            toks.append(("NUM", m.group(), offset + i))
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            toks.append(("ID", m.group(), offset + i))
            i = m.end()
            continue
        raise ParseError(f"unexpected character {c!r}", line, offset + i + 1)
    toks.append(("EOF", None, offset + n))
    return toks


def canon_key(v):
    """Deterministic sort key for canonical values."""
    return repr(v)


class _ValueParser:
    def __init__(self, text, line, offset, index):
        self.toks = _tokenize(text, line, offset)
        self.i = 0
        self.line = line
        self.index = index

    def error(self, message, tok=None):
        tok = tok or self.toks[self.i]
        return ParseError(message, self.line, tok[2] + 1)

    def peek(self):
        return self.toks[self.i]

    def take(self, kind):
        tok = self.toks[self.i]
        if tok[0] != kind:
            what = "end of line" if tok[0] == "EOF" else repr(tok[1])
            raise self.error(f"expected {kind!r}, found {what}", tok)
        self.i += 1
        return tok

    def at(self, kind):
        return self.toks[self.i][0] == kind

    def finish(self):
        if not self.at("EOF"):
            raise self.error(f"trailing input {self.peek()[1]!r}")

    def value(self, t):
        tok = self.peek()
        if tok[0] == "(" and not isinstance(t, Product) and not (isinstance(t, Exp) and t.numeric):
            self.take("(")
            v = self.value(t)
            self.take(")")
            return v
        if isinstance(t, Var):
            tok = self.take("ID")
            if tok[1] not in self.index:
                raise self.error(f"unknown state {tok[1]!r}", tok)
            return self.index[tok[1]]
        if isinstance(t, Product):
            self.take("(")
            items = []
            for k, child in enumerate(t.children):
                if k:
                    self.take(",")
                items.append(self.value(child))
            self.take(")")
            return tuple(items)
        if isinstance(t, Sum):
            tok = self.take("ID")
            if tok[1] != "inj":
                raise self.error(f"expected 'inj', found {tok[1]!r}", tok)
            num = self.take("NUM")
            if not num[1].isdigit() or int(num[1]) >= len(t.children):
                raise self.error(f"injection index must be in 0..{len(t.children) - 1}", num)
            k = int(num[1])
            return Inj(k, self.value(t.children[k]))
        if isinstance(t, Exp):
            return self.exp(t)
        if isinstance(t, ConstSet):
            tok = self.peek()
            if tok[0] not in ("ID", "NUM") or tok[1] not in t.symbols:
                raise self.error(f"expected one of {{{','.join(t.symbols)}}}")
            self.i += 1
            return tok[1]
        if isinstance(t, ConstNat):
            tok = self.take("NUM")
            if not tok[1].isdigit():
                raise self.error(f"expected a natural number, found {tok[1]!r}", tok)
            return int(tok[1])
        if isinstance(t, ConstMonoid):
            return self.literal(t.monoid)
        if isinstance(t, (Pow, Bag)):
            items = self.collection(t.child)
            if isinstance(t, Pow):
                items = tuple(dict.fromkeys(items))
            return items
        if isinstance(t, (MonoidVal, Dist)):
            return self.weighted(t)
        raise TypeError(f"unknown term node {t!r}")

    def literal(self, monoid):
        tok = self.take("NUM")
        try:
            return M.parse_literal(monoid, tok[1])
        except ValueError as exc:
            raise self.error(str(exc), tok) from None

    def collection(self, child):
        self.take("{")
        items = []
        if not self.at("}"):
            items.append(canon(child, self.value(child)))
            while self.at(","):
                self.take(",")
                items.append(canon(child, self.value(child)))
        self.take("}")
        return tuple(items)

    def weighted(self, t):
        monoid = M.RAT_ADD if isinstance(t, Dist) else t.monoid
        start = self.peek()
        self.take("{")
        items = []
        seen = set()
        if not self.at("}"):
            while True:
                ktok = self.peek()
                key = canon(t.child, self.value(t.child))
                if key in seen:
                    raise self.error("duplicate key in weighted map", ktok)
                seen.add(key)
                self.take(":")
                wtok = self.peek()
                w = self.literal(monoid)
                if isinstance(t, Dist) and w < 0:
                    raise self.error("probabilities must be non-negative", wtok)
                items.append((key, w))
                if not self.at(","):
                    break
                self.take(",")
        self.take("}")
        if isinstance(t, Dist):
            total = sum((w for _, w in items), Fraction(0))
            if total != 1:
                raise self.error(f"distribution sums to {total}, not 1", start)
        return tuple(items)

    def exp(self, t):
        letters = t.alphabet
        if t.numeric and self.at("("):
            self.take("(")
            items = []
            for k in range(len(letters)):
                if k:
                    self.take(",")
                items.append(self.value(t.child))
            self.take(")")
            return tuple(items)
        start = self.take("{")
        found = {}
        while not self.at("}"):
            tok = self.peek()
            if tok[0] not in ("ID", "NUM") or tok[1] not in letters:
                raise self.error(f"expected a letter of {{{','.join(letters)}}}")
            if tok[1] in found:
                raise self.error(f"letter {tok[1]!r} given twice")
            self.i += 1
            self.take(":")
            found[tok[1]] = self.value(t.child)
            if not self.at(","):
                break
            self.take(",")
        self.take("}")
        missing = [a for a in letters if a not in found]
        if missing:
            raise self.error(f"missing letters {missing}", start)
        return tuple(found[a] for a in letters)


# -- canonical values ----------------------------------------------------------

def canon(t, v):
    """Canonical form of value ``v`` of term ``t``: sets and bags sorted,
    sets deduplicated, weighted maps sorted with zero entries dropped."""
    if isinstance(t, (Var, ConstSet, ConstNat, ConstMonoid)):
        return v
    if isinstance(t, Product):
        return tuple(canon(c, x) for c, x in zip(t.children, v))
    if isinstance(t, Sum):
        return Inj(v.index, canon(t.children[v.index], v.value))
    if isinstance(t, Exp):
        return tuple(canon(t.child, x) for x in v)
    if isinstance(t, Pow):
        items = {canon(t.child, x) for x in v}
        return tuple(sorted(items, key=canon_key))
    if isinstance(t, Bag):
        return tuple(sorted((canon(t.child, x) for x in v), key=canon_key))
    if isinstance(t, (MonoidVal, Dist)):
        monoid = M.RAT_ADD if isinstance(t, Dist) else t.monoid
        acc = {}
        for key, w in v:
            key = canon(t.child, key)
            acc[key] = monoid.add(acc[key], w) if key in acc else w
        items = [(k, w) for k, w in acc.items() if w != monoid.zero]
        return tuple(sorted(items, key=lambda kw: canon_key(kw[0])))
    raise TypeError(f"unknown term node {t!r}")


def map_states(t, v, f):
    """Apply ``f`` to every state occurring in ``v`` and re-canonicalize;
    this is the functor action F(f) on the value."""
    return canon(t, _map(t, v, f))


def _map(t, v, f):
    if isinstance(t, Var):
        return f(v)
    if isinstance(t, (ConstSet, ConstNat, ConstMonoid)):
        return v
    if isinstance(t, Product):
        return tuple(_map(c, x, f) for c, x in zip(t.children, v))
    if isinstance(t, Sum):
        return Inj(v.index, _map(t.children[v.index], v.value, f))
    if isinstance(t, Exp):
        return tuple(_map(t.child, x, f) for x in v)
    if isinstance(t, (Pow, Bag)):
        return tuple(_map(t.child, x, f) for x in v)
    if isinstance(t, (MonoidVal, Dist)):
        return tuple((_map(t.child, k, f), w) for k, w in v)
    raise TypeError(f"unknown term node {t!r}")


# -- parsing -------------------------------------------------------------------

def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if line.strip():
            yield lineno, line


def parse_coalgebra(t, body, first_line: int = 2) -> SymbolicCoalgebra:
    """Parse state lines (an iterable of strings, or ``(lineno, text)`` pairs)
    against the functor term ``t``."""
    if isinstance(body, str):
        body = body.splitlines()
    lines = []
    for k, item in enumerate(body):
        if isinstance(item, tuple):
            lineno, raw = item
        else:
            lineno, raw = first_line + k, item
        raw = raw.split("#", 1)[0]
        if raw.strip():
            lines.append((lineno, raw))
    names = []
    index = {}
    for lineno, raw in lines:
        m = _NAME.match(raw)
        if not m:
            raise ParseError("expected 'name: value'", lineno, 1)
        name = m.group(1)
        if name == "inj":
            raise ParseError("'inj' is reserved and cannot name a state", lineno, m.start(1) + 1)
        if name in index:
            raise ParseError(f"duplicate state {name!r}", lineno, m.start(1) + 1)
        index[name] = len(names)
        names.append(name)
    values = []
    for lineno, raw in lines:
        m = _NAME.match(raw)
        p = _ValueParser(raw[m.end():], lineno, m.end(), index)
        v = p.value(t)
        p.finish()
        values.append(v)
    return SymbolicCoalgebra(t, names, values)


def parse_file(text: str):
    """Parse a whole coalgebra file; returns the :class:`SymbolicCoalgebra`."""
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty input: expected a functor on the first line", 1)
    lineno, first = lines[0]
    try:
        t = parse_functor(first)
    except ParseError as exc:
        raise ParseError(exc.message, lineno, exc.col) from None
    return parse_coalgebra(t, lines[1:])


# -- printing ------------------------------------------------------------------

def format_value(t, v, names) -> str:
    if isinstance(t, Var):
        return names[v]
    if isinstance(t, (ConstSet, ConstNat)):
        return str(v)
    if isinstance(t, ConstMonoid):
        return M.format_literal(t.monoid, v)
    if isinstance(t, Product):
        return "(" + ", ".join(format_value(c, x, names) for c, x in zip(t.children, v)) + ")"
    if isinstance(t, Sum):
        return f"inj {v.index} " + format_value(t.children[v.index], v.value, names)
    if isinstance(t, Exp):
        if t.numeric:
            return "(" + ", ".join(format_value(t.child, x, names) for x in v) + ")"
        return "{" + ", ".join(f"{a}: {format_value(t.child, x, names)}"
                               for a, x in zip(t.alphabet, v)) + "}"
    if isinstance(t, (Pow, Bag)):
        return "{" + ", ".join(format_value(t.child, x, names) for x in v) + "}"
    if isinstance(t, (MonoidVal, Dist)):
        monoid = M.RAT_ADD if isinstance(t, Dist) else t.monoid
        return "{" + ", ".join(f"{format_value(t.child, k, names)}: {M.format_literal(monoid, w)}"
                               for k, w in v) + "}"
    raise TypeError(f"unknown term node {t!r}")


def format_coalgebra(sym: SymbolicCoalgebra) -> str:
    lines = [format_term(sym.term), ""]
    for name, v in zip(sym.names, sym.values):
        lines.append(f"{name}: {format_value(sym.term, v, sym.names)}")
    return "\n".join(lines) + "\n"


def quotient(sym: SymbolicCoalgebra, blocks) -> SymbolicCoalgebra:
    """The quotient coalgebra with one representative per block.  ``blocks``
    lists original state indices; each block is named after its first state."""
    block_of = {}
    for b, members in enumerate(blocks):
        for s in members:
            block_of[s] = b
    if len(block_of) != len(sym.names):
        raise ValueError("blocks must cover every state exactly once")
    names = [sym.names[members[0]] for members in blocks]
    values = [map_states(sym.term, sym.values[members[0]], block_of.__getitem__)
              for members in blocks]
    return SymbolicCoalgebra(sym.term, names, values)


# -- flattening ----------------------------------------------------------------

@dataclass
class EncodedCoalgebra:
    """Multi-sorted coalgebra in edge-list form.

    States ``0 .. n_original-1`` are the user's states; the rest are
    intermediate states introduced at sort boundaries.  Outgoing edges of
    state ``x`` are ``out_label[k], out_target[k]`` for ``k`` in
    ``range(out_start[x], out_start[x+1])``; ``in_*`` is the reverse index.
    """
    plan: object
    names: list
    sort_of: list
    f1: list
    out_start: list
    out_label: list
    out_target: list
    in_start: list = field(default_factory=list)
    in_source: list = field(default_factory=list)
    in_label: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.sort_of)

    @property
    def m(self) -> int:
        return len(self.out_target)

    @property
    def n_original(self) -> int:
        return len(self.names)

    def back_map(self):
        return {name: i for i, name in enumerate(self.names)}

    def fingerprint(self, x):
        return (self.sort_of[x], self.f1[x])

    def edges(self, x):
        lo, hi = self.out_start[x], self.out_start[x + 1]
        return list(zip(self.out_label[lo:hi], self.out_target[lo:hi]))

    def build_reverse(self):
        n = self.n
        counts = [0] * (n + 1)
        for y in self.out_target:
            counts[y + 1] += 1
        for i in range(n):
            counts[i + 1] += counts[i]
        self.in_start = counts[:]
        fill = counts[:n]
        source = [0] * self.m
        label = [None] * self.m
        out_start, out_label, out_target = self.out_start, self.out_label, self.out_target
        for x in range(n):
            for k in range(out_start[x], out_start[x + 1]):
                y = out_target[k]
                pos = fill[y]
                source[pos] = x
                label[pos] = out_label[k]
                fill[y] = pos + 1
        self.in_source = source
        self.in_label = label

    def audit(self):
        """Consistency checks: edge counts, reverse index, per-sort labels."""
        if len(self.out_start) != self.n + 1 or self.out_start[-1] != self.m:
            raise AssertionError("edge offsets do not match m")
        if len(self.in_source) != self.m:
            raise AssertionError("reverse index does not match m")
        total = sum(self.out_start[x + 1] - self.out_start[x] for x in range(self.n))
        if total != self.m:
            raise AssertionError("m differs from the sum of out-degrees")
        sorts = self.plan.sorts
        for x in range(self.n):
            for lab, y in self.edges(x):
                s = sorts[self.sort_of[x]]
                if s.kind in ("pow", "bag") and lab is not None:
                    raise AssertionError(f"state {x}: unit label expected")
                if s.kind == "poly" and not isinstance(lab, int):
                    raise AssertionError(f"state {x}: position label expected")
                if s.kind in ("monoid", "dist") and lab == (s.monoid or M.RAT_ADD).zero:
                    raise AssertionError(f"state {x}: zero weight on an edge")


def flatten(sym: SymbolicCoalgebra, plan=None) -> EncodedCoalgebra:
    """Encode ``sym`` as a multi-sorted edge list, creating one intermediate
    state for every sort-crossing subvalue."""
    if plan is None:
        plan = plan_decomposition(sym.term)
    sorts = plan.sorts
    counts = {}

    def count(node):
        key = id(node)
        if key not in counts:
            counts[key] = leaf_count(node)
        return counts[key]

    sort_of = [plan.original_sort] * len(sym.names)
    values = list(sym.values)
    f1 = []
    out_start = [0]
    out_label = []
    out_target = []
    label_append = out_label.append
    target_append = out_target.append

    def spawn(sort_index, value):
        sort_of.append(sort_index)
        values.append(value)
        return len(sort_of) - 1

    # per poly sort: which argument leaves are X itself (their values are state ids)
    var_leaf = {s.index: [isinstance(leaf, Var) for leaf in poly_leaves(s.node)]
                for s in sorts if s.kind == "poly"}

    x = 0
    while x < len(sort_of):
        s = sorts[sort_of[x]]
        v = values[x]
        kind = s.kind
        if kind == "poly":
            positions = []
            f1.append(_walk(s.node, v, 0, positions, count))
            leaf_sorts = s.leaf_sorts
            is_var = var_leaf[s.index]
            for p, (leaf, sub) in enumerate(positions):
                target = sub if is_var[leaf] else spawn(leaf_sorts[leaf], sub)
                label_append(p)
                target_append(target)
        elif kind in ("pow", "bag"):
            direct = isinstance(s.node.child, Var)
            cs = s.child_sort
            for item in v:
                label_append(None)
                target_append(item if direct else spawn(cs, item))
            f1.append(len(v) > 0 if kind == "pow" else len(v))
        else:
            monoid = M.RAT_ADD if kind == "dist" else s.monoid
            zero = monoid.zero
            add = monoid.add
            direct = isinstance(s.node.child, Var)
            cs = s.child_sort
            total = zero
            for key, w in v:
                if w == zero:
                    continue
                total = add(total, w)
                label_append(w)
                target_append(key if direct else spawn(cs, key))
            f1.append(total)
        out_start.append(len(out_target))
        values[x] = None
        x += 1

    enc = EncodedCoalgebra(plan, list(sym.names), sort_of, f1, out_start, out_label, out_target)
    enc.build_reverse()
    return enc


_HOLE = "*"


def _walk(node, v, base, positions, count):
    """Shape of ``v`` with argument positions erased; appends
    ``(leaf index, subvalue)`` for every position."""
    if is_leaf(node):
        positions.append((base, v))
        return _HOLE
    if isinstance(node, Product):
        shape = []
        offset = base
        for c, x in zip(node.children, v):
            shape.append(_walk(c, x, offset, positions, count))
            offset += count(c)
        return tuple(shape)
    if isinstance(node, Sum):
        offset = base
        for c in node.children[:v.index]:
            offset += count(c)
        return Inj(v.index, _walk(node.children[v.index], v.value, offset, positions, count))
    if isinstance(node, Exp):
        return tuple(_walk(node.child, x, base, positions, count) for x in v)
    return v


def load(text: str):
    """Parse and flatten a coalgebra file; returns ``(symbolic, encoded)``."""
    sym = parse_file(text)
    return sym, flatten(sym)

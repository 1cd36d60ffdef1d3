"""Functor expressions: parsing, printing and the sort decomposition.

Surface syntax (``^`` binds tighter than ``x``, which binds tighter than
``+``; prefix operators bind tighter than any infix or postfix operator)::

    T ::= X | P T | B T | D T | M^T | T x T | T + T | T^A | C | (T)
    M ::= Z | R | N+ | (N,max) | W64
    C ::= N | {s1,...,sn} | <n> | M          (a monoid token alone is its carrier)
    A ::= {s1,...,sn} | <n>

A numeral ``n`` in constant position is the set ``{0,...,n-1}``; as an
exponent it is an alphabet of ``n`` letters whose values are written as
``n``-tuples.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .monoid import MONOIDS, Monoid


class ParseError(ValueError):
    """Syntax or shape error in an input file."""

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}"
            if col is not None:
                where += f", column {col}"
            where += ": "
        elif col is not None:
            where = f"column {col}: "
        super().__init__(where + message)


# -- AST --------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Pow:
    child: object


@dataclass(frozen=True)
class Bag:
    child: object


@dataclass(frozen=True)
class Dist:
    child: object


@dataclass(frozen=True)
class MonoidVal:
    monoid: Monoid
    child: object


@dataclass(frozen=True)
class Product:
    children: tuple


@dataclass(frozen=True)
class Sum:
    children: tuple


@dataclass(frozen=True)
class Exp:
    child: object
    alphabet: tuple

    @property
    def numeric(self) -> bool:
        return _is_numeric(self.alphabet)


@dataclass(frozen=True)
class ConstSet:
    symbols: tuple

    @property
    def numeric(self) -> bool:
        return _is_numeric(self.symbols)


@dataclass(frozen=True)
class ConstNat:
    pass


@dataclass(frozen=True)
class ConstMonoid:
    monoid: Monoid


BASIC = (Pow, Bag, Dist, MonoidVal)
POLY = (Product, Sum, Exp, ConstSet, ConstNat, ConstMonoid)


def _is_numeric(symbols) -> bool:
    return symbols == tuple(str(i) for i in range(len(symbols)))


def numeric_set(n: int) -> tuple:
    return tuple(str(i) for i in range(n))


def contains_var(t) -> bool:
    if isinstance(t, Var):
        return True
    if isinstance(t, (Product, Sum)):
        return any(contains_var(c) for c in t.children)
    if isinstance(t, (Pow, Bag, Dist, MonoidVal, Exp)):
        return contains_var(t.child)
    return False


# -- lexer ------------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUM = re.compile(r"\d+")
_NMAX = re.compile(r"\(\s*N\s*,\s*max\s*\)")
_NPLUS = re.compile(r"N\s*\+(?=\s*(?:\^|x|\)|\+|$))")


def _lex_term(text: str):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        m = _NMAX.match(text, i)
        if m:
            toks.append(("MONOID", "(N,max)", i))
            i = m.end()
            continue
        m = _NPLUS.match(text, i)
        if m:
            toks.append(("MONOID", "N+", i))
            i = m.end()
            continue
        if text.startswith("W64", i):
            toks.append(("MONOID", "W64", i))
            i += 3
            continue
        if c in "ZR":
            toks.append(("MONOID", c, i))
            i += 1
            continue
        if c == "C":
            raise ParseError("unsupported monoid: complex numbers (C,+,0) are not implemented", col=i + 1)
        if c == "{":
            j = text.find("}", i)
            if j < 0:
                raise ParseError("unterminated '{'", col=i + 1)
            body = text[i + 1:j]
            parts = [p.strip() for p in body.split(",")]
            if body.strip() == "" or any(not p for p in parts):
                raise ParseError("a set must list at least one symbol", col=i + 1)
            for p in parts:
                if not _IDENT.fullmatch(p):
                    raise ParseError(f"{p!r} is not a C-style identifier", col=i + 1)
            if len(set(parts)) != len(parts):
                raise ParseError("duplicate symbol in set", col=i + 1)
            toks.append(("SET", tuple(parts), i))
            i = j + 1
            continue
        if c.isdigit():
            m = _NUM.match(text, i)
            toks.append(("NUM", int(m.group()), i))
            i = m.end()
            continue
        if c in "XxPBDN()+^":
            toks.append((c, c, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", col=i + 1)
    toks.append(("EOF", None, n))
    return toks


class _TermParser:
    def __init__(self, text):
        self.toks = _lex_term(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "EOF" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", col=tok[2] + 1)
        self.i += 1
        return tok

    def parse(self):
        t = self.sum()
        tok = self.peek()
        if tok[0] != "EOF":
            raise ParseError(f"unexpected {tok[1]!r}", col=tok[2] + 1)
        return t

    def sum(self):
        items = [self.product()]
        while self.peek()[0] == "+":
            self.take()
            items.append(self.product())
        return items[0] if len(items) == 1 else Sum(tuple(items))

    def product(self):
        items = [self.power()]
        while self.peek()[0] == "x":
            self.take()
            items.append(self.power())
        return items[0] if len(items) == 1 else Product(tuple(items))

    def power(self):
        t = self.unary()
        while self.peek()[0] == "^":
            self.take()
            tok = self.take()
            if tok[0] == "SET":
                t = Exp(t, tok[1])
            elif tok[0] == "NUM":
                if tok[1] < 1:
                    raise ParseError("exponent must be at least 1", col=tok[2] + 1)
                t = Exp(t, numeric_set(tok[1]))
            else:
                raise ParseError("expected an alphabet after '^'", col=tok[2] + 1)
        return t

    def unary(self):
        tok = self.peek()
        kind = tok[0]
        if kind == "P":
            self.take()
            return Pow(self.unary())
        if kind == "B":
            self.take()
            return Bag(self.unary())
        if kind == "D":
            self.take()
            return Dist(self.unary())
        if kind == "MONOID":
            self.take()
            m = MONOIDS[tok[1]]
            if self.peek()[0] == "^":
                self.take()
                return MonoidVal(m, self.unary())
            return ConstMonoid(m)
        if kind == "X":
            self.take()
            return Var()
        if kind == "N":
            self.take()
            return ConstNat()
        if kind == "SET":
            self.take()
            return ConstSet(tok[1])
        if kind == "NUM":
            self.take()
            if tok[1] < 1:
                raise ParseError("a constant set must be non-empty", col=tok[2] + 1)
            return ConstSet(numeric_set(tok[1]))
        if kind == "(":
            self.take()
            t = self.sum()
            self.take(")")
            return t
        what = "end of input" if kind == "EOF" else repr(tok[1])
        raise ParseError(f"unexpected {what}", col=tok[2] + 1)


def parse_functor(line: str):
    """Parse a functor expression into its AST."""
    return _TermParser(line).parse()


# -- printing ---------------------------------------------------------------

_PREC_SUM, _PREC_PROD, _PREC_POW, _PREC_UNARY = 1, 2, 3, 4


def _set_text(symbols) -> str:
    if _is_numeric(symbols):
        return str(len(symbols))
    return "{" + ",".join(symbols) + "}"


def format_term(t) -> str:
    return _fmt(t, 0)


def _ends_with_monoid(t):
    while isinstance(t, (Pow, Bag, Dist, MonoidVal)):
        t = t.child
    return isinstance(t, ConstMonoid)


def _fmt(t, ctx):
    if isinstance(t, Sum):
        text, prec = " + ".join(_fmt(c, _PREC_SUM + 1) for c in t.children), _PREC_SUM
    elif isinstance(t, Product):
        text, prec = " x ".join(_fmt(c, _PREC_PROD + 1) for c in t.children), _PREC_PROD
    elif isinstance(t, Exp):
        base = _fmt(t.child, _PREC_POW)
        if _ends_with_monoid(t.child):
            base = f"({base})"          # a trailing "Z^..." would read as Z-weighted maps
        text, prec = base + "^" + _set_text(t.alphabet), _PREC_POW
    elif isinstance(t, Pow):
        text, prec = "P " + _fmt(t.child, _PREC_UNARY), _PREC_UNARY
    elif isinstance(t, Bag):
        text, prec = "B " + _fmt(t.child, _PREC_UNARY), _PREC_UNARY
    elif isinstance(t, Dist):
        text, prec = "D " + _fmt(t.child, _PREC_UNARY), _PREC_UNARY
    elif isinstance(t, MonoidVal):
        text, prec = t.monoid.name + "^" + _fmt(t.child, _PREC_UNARY), _PREC_UNARY
    elif isinstance(t, Var):
        text, prec = "X", _PREC_UNARY
    elif isinstance(t, ConstNat):
        text, prec = "N", _PREC_UNARY
    elif isinstance(t, ConstSet):
        text, prec = _set_text(t.symbols), _PREC_UNARY
    elif isinstance(t, ConstMonoid):
        text, prec = t.monoid.name, _PREC_UNARY
    else:
        raise TypeError(f"not a functor term: {t!r}")
    return f"({text})" if prec < ctx else text


# -- decomposition into sorts -----------------------------------------------

@dataclass
class Sort:
    """One basic functor of the flattened, multi-sorted coalgebra.

    ``kind`` is one of ``"pow"``, ``"bag"``, ``"dist"``, ``"monoid"`` or
    ``"poly"``.  ``node`` is the basic node, or the root of a polynomial
    region.  A basic sort sends its argument to ``child_sort``; a polynomial
    sort has one argument leaf per entry of ``leaf_sorts``, numbered in
    left-to-right order with the body of an exponent counted once.
    """
    index: int
    kind: str
    node: object
    monoid: Optional[Monoid] = None
    child_sort: Optional[int] = None
    leaf_sorts: Optional[list] = None


@dataclass
class SortPlan:
    sorts: list
    original_sort: int

    def __len__(self):
        return len(self.sorts)

    def describe(self):
        out = []
        for s in self.sorts:
            if s.kind == "poly":
                out.append(f"Poly({format_term(s.node)})")
            elif s.kind == "monoid":
                out.append(f"MonoidVal({s.monoid.name})")
            else:
                out.append(s.kind.capitalize())
        return out


def plan_decomposition(t) -> SortPlan:
    """Split ``t`` into basic sorts, fusing maximal polynomial regions."""
    if not contains_var(t) and not _has_basic(t):
        raise ValueError(f"functor {format_term(t)} is a constant; "
                         "its coalgebras carry no transitions")
    sorts = []

    def new_sort(node):
        kind = _kind(node)
        s = Sort(len(sorts), kind, node, node.monoid if kind == "monoid" else None)
        sorts.append(s)
        return s

    root = new_sort(t)
    pending = [root]
    while pending:
        s = pending.pop(0)
        if s.kind == "poly":
            s.leaf_sorts = []
            for leaf in poly_leaves(s.node):
                if isinstance(leaf, Var):
                    s.leaf_sorts.append(root.index)
                else:
                    child = new_sort(leaf)
                    s.leaf_sorts.append(child.index)
                    pending.append(child)
        else:
            c = s.node.child
            if isinstance(c, Var):
                s.child_sort = root.index
            else:
                child = new_sort(c)
                s.child_sort = child.index
                pending.append(child)
    return SortPlan(sorts, root.index)


def _has_basic(t) -> bool:
    if isinstance(t, BASIC):
        return True
    if isinstance(t, (Product, Sum)):
        return any(_has_basic(c) for c in t.children)
    if isinstance(t, Exp):
        return _has_basic(t.child)
    return False


def _kind(node) -> str:
    if isinstance(node, Pow):
        return "pow"
    if isinstance(node, Bag):
        return "bag"
    if isinstance(node, Dist):
        return "dist"
    if isinstance(node, MonoidVal):
        return "monoid"
    return "poly"


def is_leaf(node) -> bool:
    """True for nodes that end a polynomial region."""
    return isinstance(node, (Var, Pow, Bag, Dist, MonoidVal))


def poly_leaves(node):
    """Argument leaves of the polynomial region rooted at ``node`` in
    left-to-right order; a bare leaf is a region with one argument."""
    out = []

    def walk(n):
        if is_leaf(n):
            out.append(n)
        elif isinstance(n, (Product, Sum)):
            for c in n.children:
                walk(c)
        elif isinstance(n, Exp):
            walk(n.child)
    walk(node)
    return out


def leaf_count(node) -> int:
    if is_leaf(node):
        return 1
    if isinstance(node, (Product, Sum)):
        return sum(leaf_count(c) for c in node.children)
    if isinstance(node, Exp):
        return leaf_count(node.child)
    return 0

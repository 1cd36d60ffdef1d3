"""Commutative monoids used as transition weights.

Each supported monoid is described by a :class:`Monoid` record bundling the
carrier operations.  Elements are plain Python values (``int`` or
``fractions.Fraction``) so they can be hashed, compared and used directly as
dictionary keys by the refinement engine.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

WORD_MASK = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class Monoid:
    name: str           # surface token, e.g. "Z" or "(N,max)"
    title: str
    zero: Any
    add: Callable[[Any, Any], Any] = field(repr=False)
    is_group: bool = False
    is_cancellative: bool = False
    negate: Optional[Callable[[Any], Any]] = field(default=None, repr=False)
    idempotent: bool = False

    def __repr__(self):
        return f"Monoid({self.name})"

    def sum(self, values):
        acc = self.zero
        add = self.add
        for v in values:
            acc = add(acc, v)
        return acc

    def contains(self, value) -> bool:
        return _MEMBERSHIP[self.name](value)


def _int_add(a, b):
    return a + b


def _neg(a):
    return -a


INT_ADD = Monoid("Z", "(Z,+,0)", 0, _int_add, is_group=True,
                 is_cancellative=True, negate=_neg)
RAT_ADD = Monoid("R", "(R,+,0) over exact rationals", Fraction(0), _int_add,
                 is_group=True, is_cancellative=True, negate=_neg)
NAT_ADD = Monoid("N+", "(N,+,0)", 0, _int_add, is_cancellative=True)
NAT_MAX = Monoid("(N,max)", "(N,max,0)", 0, max, idempotent=True)
WORD64_OR = Monoid("W64", "(P(64),union,empty)", 0, int.__or__, idempotent=True)
BOOL_OR = Monoid("2", "(2,or,0)", 0, int.__or__, idempotent=True)

MONOIDS = {m.name: m for m in (INT_ADD, RAT_ADD, NAT_ADD, NAT_MAX, WORD64_OR, BOOL_OR)}

_MEMBERSHIP = {
    "Z": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "R": lambda v: isinstance(v, Fraction),
    "N+": lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= 0,
    "(N,max)": lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= 0,
    "W64": lambda v: isinstance(v, int) and not isinstance(v, bool) and 0 <= v <= WORD_MASK,
    "2": lambda v: v in (0, 1),
}


def add(m: Monoid, a, b):
    return m.add(a, b)


def negate(m: Monoid, a):
    if m.negate is None:
        raise ValueError(f"{m.title} is not a group")
    return m.negate(a)


def scale(m: Monoid, k: int, a):
    """Return ``a`` added to itself ``k`` times, using binary doubling."""
    if k < 0:
        raise ValueError("scale factor must be non-negative")
    if k == 0 or a == m.zero:
        return m.zero
    if m.idempotent:
        return a
    if m is INT_ADD or m is RAT_ADD or m is NAT_ADD:
        return k * a
    result = m.zero
    base = a
    while k:
        if k & 1:
            result = m.add(result, base)
        k >>= 1
        if k:
            base = m.add(base, base)
    return result


# -- ordering and canonical bytes -------------------------------------------

def sort_key(m: Monoid, a):
    """Total order on elements of ``m``; numeric for every built-in monoid."""
    return a


def encode(m: Monoid, a) -> bytes:
    """Injective byte encoding of an element, namespaced by the monoid."""
    if isinstance(a, Fraction):
        body = f"{a.numerator}/{a.denominator}"
    else:
        body = str(int(a))
    return m.name.encode() + b":" + body.encode()


# -- literals ---------------------------------------------------------------

_INT_RE = re.compile(r"[+-]?\d+\Z")
_NAT_RE = re.compile(r"\+?\d+\Z")
_DEC_RE = re.compile(r"([+-]?)(\d+)(?:\.(\d+))?\Z")
_FRAC_RE = re.compile(r"([+-]?\d+)/(\d+)\Z")
_HEX_RE = re.compile(r"0[xX][0-9a-fA-F]+\Z")


def parse_literal(m: Monoid, text: str):
    """Parse a weight literal for ``m``; raises ``ValueError`` on bad input."""
    text = text.strip()
    if m is INT_ADD:
        if _INT_RE.match(text):
            return int(text)
    elif m is NAT_ADD or m is NAT_MAX:
        if _NAT_RE.match(text):
            return int(text)
    elif m is WORD64_OR:
        if _HEX_RE.match(text):
            v = int(text, 16)
        elif _NAT_RE.match(text):
            v = int(text)
        else:
            v = None
        if v is not None:
            if v > WORD_MASK:
                raise ValueError(f"{text} does not fit into 64 bits")
            return v
    elif m is RAT_ADD:
        d = _DEC_RE.match(text)
        if d:
            sign, whole, frac = d.groups()
            value = Fraction(int(whole))
            if frac:
                value += Fraction(int(frac), 10 ** len(frac))
            return -value if sign == "-" else value
        f = _FRAC_RE.match(text)
        if f:
            if int(f.group(2)) == 0:
                raise ValueError("zero denominator")
            return Fraction(int(f.group(1)), int(f.group(2)))
    elif m is BOOL_OR:
        if text in ("0", "1"):
            return int(text)
    raise ValueError(f"invalid literal {text!r} for monoid {m.title}")


def format_literal(m: Monoid, a) -> str:
    if m is WORD64_OR:
        return hex(a)
    if isinstance(a, Fraction):
        if a.denominator == 1:
            return str(a.numerator)
        # finite decimal expansion exists iff the denominator is 2^i 5^j
        d = a.denominator
        twos = fives = 0
        while d % 2 == 0:
            d //= 2
            twos += 1
        while d % 5 == 0:
            d //= 5
            fives += 1
        if d == 1:
            digits = max(twos, fives)
            scaled = abs(a) * 10 ** digits
            whole, frac = divmod(scaled.numerator, 10 ** digits)
            sign = "-" if a < 0 else ""
            return f"{sign}{whole}.{frac:0{digits}d}".rstrip("0")
        return f"{a.numerator}/{a.denominator}"
    return str(a)


# -- Grothendieck group -----------------------------------------------------

@dataclass(frozen=True)
class GrothendieckElement:
    """Formal difference ``pos - neg`` kept in canonical form."""
    pos: Any
    neg: Any


def grothendieck_normalize(m: Monoid, pos, neg) -> GrothendieckElement:
    """Canonical representative of the class of ``(pos, neg)``.

    Two pairs are identified iff ``pos + neg' == pos' + neg``.
    """
    if not m.is_cancellative:
        raise ValueError(f"{m.title} is not cancellative")
    if m.is_group:
        return GrothendieckElement(m.add(pos, m.negate(neg)), m.zero)
    if m is NAT_ADD:
        low = min(pos, neg)
        return GrothendieckElement(pos - low, neg - low)
    raise ValueError(f"no canonical form known for {m.title}")


class GrothendieckGroup:
    """Group completion of a cancellative monoid, as a group-like record."""

    def __init__(self, base: Monoid):
        if not base.is_cancellative:
            raise ValueError(f"{base.title} is not cancellative")
        self.base = base
        self.name = f"G({base.name})"
        self.zero = grothendieck_normalize(base, base.zero, base.zero)
        self.is_group = True

    def embed(self, a) -> GrothendieckElement:
        return grothendieck_normalize(self.base, a, self.base.zero)

    def add(self, a: GrothendieckElement, b: GrothendieckElement):
        base = self.base
        return grothendieck_normalize(base, base.add(a.pos, b.pos), base.add(a.neg, b.neg))

    def negate(self, a: GrothendieckElement):
        return GrothendieckElement(a.neg, a.pos)

    def sum(self, values):
        acc = self.zero
        for v in values:
            acc = self.add(acc, v)
        return acc

    def __repr__(self):
        return f"GrothendieckGroup({self.base.name})"

"""Refinable partition with constant-time marking and marked-size splits.

Elements of a block occupy a contiguous slice of ``elems``; the marked
elements of block ``b`` are kept in ``elems[start[b]:mid[b]]``.
"""
from __future__ import annotations


class RefinablePartition:
    __slots__ = ("elems", "loc", "blk", "start", "mid", "end", "steps")

    def __init__(self, n: int, groups=None):
        """Partition of ``range(n)``; one block unless ``groups`` (a list of
        lists covering every element exactly once) is given."""
        if groups is None:
            groups = [list(range(n))] if n else []
        self.elems = []
        self.blk = [0] * n
        self.start = []
        self.mid = []
        self.end = []
        for b, group in enumerate(groups):
            self.start.append(len(self.elems))
            self.mid.append(len(self.elems))
            self.elems.extend(group)
            self.end.append(len(self.elems))
            for s in group:
                self.blk[s] = b
        if len(self.elems) != n:
            raise ValueError("groups do not cover the state set")
        self.loc = [0] * n
        for i, s in enumerate(self.elems):
            self.loc[s] = i
        self.steps = 0      # instrumentation: element moves done by split_marked

    @property
    def num_blocks(self) -> int:
        return len(self.start)

    def block_of(self, s: int) -> int:
        return self.blk[s]

    def size(self, b: int) -> int:
        return self.end[b] - self.start[b]

    def marked_count(self, b: int) -> int:
        return self.mid[b] - self.start[b]

    def block_info(self, b: int):
        return self.end[b] - self.start[b], self.mid[b] - self.start[b]

    def members(self, b: int):
        return self.elems[self.start[b]:self.end[b]]

    def first(self, b: int) -> int:
        return self.elems[self.start[b]]

    def mark(self, s: int) -> None:
        b = self.blk[s]
        i = self.loc[s]
        m = self.mid[b]
        if i >= m:
            elems = self.elems
            other = elems[m]
            elems[m] = s
            elems[i] = other
            self.loc[s] = m
            self.loc[other] = i
            self.mid[b] = m + 1

    def split_marked(self, b: int):
        """Move the marked elements of ``b`` into a fresh block and return its
        id; the unmarked rest keeps ``b``.  Returns ``None`` (and clears the
        marks) when nothing or everything is marked."""
        start, m = self.start[b], self.mid[b]
        if m == start:
            return None
        if m == self.end[b]:
            self.mid[b] = start
            self.steps += 1
            return None
        new = len(self.start)
        self.start.append(start)
        self.mid.append(start)
        self.end.append(m)
        self.start[b] = m
        self.mid[b] = m
        blk = self.blk
        elems = self.elems
        for i in range(start, m):
            blk[elems[i]] = new
        self.steps += m - start
        return new

    def blocks(self):
        return [self.members(b) for b in range(len(self.start))]

    def audit(self):
        seen = 0
        for b in range(len(self.start)):
            if not self.start[b] <= self.mid[b] <= self.end[b]:
                raise AssertionError(f"block {b} has bad bounds")
            for i in range(self.start[b], self.end[b]):
                s = self.elems[i]
                if self.loc[s] != i or self.blk[s] != b:
                    raise AssertionError(f"state {s} misplaced")
            seen += self.end[b] - self.start[b]
        if seen != len(self.elems):
            raise AssertionError("blocks do not tile the element array")

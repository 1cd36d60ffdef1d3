"""Generic partition refinement on an encoded coalgebra.

Two partitions are maintained: the fine partition ``P`` (candidate classes)
and the coarse partition ``Q`` (blocks that ``P`` is already stable with
respect to).  Each state stores, per ``Q``-block it has edges into, its
interface weight and the number of those edges.  Processing a subblock
``S`` of a ``Q``-block ``B`` only touches the edges into ``S``: the weight
w.r.t. ``B`` is split into weights w.r.t. ``S`` and ``B\\S``, and the split
values group the predecessors.
"""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

from .iface import interfaces_for
from .partition import RefinablePartition
from .sumbag import InvariantError


@dataclass
class RefineStats:
    n: int = 0
    m: int = 0
    initial_blocks: int = 0
    final_blocks: int = 0
    label_volume: int = 0       # total number of labels passed to update
    update_calls: int = 0
    splitters: int = 0          # dequeued subblocks that were processed
    t_init: float = 0.0
    t_refine: float = 0.0


@dataclass
class MinimizeResult:
    blocks: list                # blocks of original state ids
    stats: RefineStats
    partition: RefinablePartition = field(repr=False, default=None)

    def block_index(self):
        out = {}
        for b, members in enumerate(self.blocks):
            for s in members:
                out[s] = b
        return out


class Refiner:
    def __init__(self, enc, ifaces=None, singleton_opt=True, debug_audits=False,
                 force_generic_monoid=False):
        self.enc = enc
        if ifaces is None:
            ifaces = interfaces_for(enc.plan, force_generic_monoid)
        self.ifaces = ifaces
        self.singleton_opt = singleton_opt
        self.debug = debug_audits
        self.stats = RefineStats(n=enc.n, m=enc.m)

    # -- setup -------------------------------------------------------------

    def initialize(self):
        enc = self.enc
        n = enc.n
        groups = {}
        for x in range(n):
            groups.setdefault((enc.sort_of[x], enc.f1[x]), []).append(x)
        self.P = P = RefinablePartition(n, list(groups.values()))
        self.Q = RefinablePartition(n)
        self.inert = [False] * n
        store = [None] * n
        out_start, out_label = enc.out_start, enc.out_label
        sort_of, f1 = enc.sort_of, enc.f1
        ifaces = self.ifaces
        for x in range(n):
            lo, hi = out_start[x], out_start[x + 1]
            if hi > lo:
                store[x] = {0: [ifaces[sort_of[x]].init(f1[x], out_label[lo:hi]), hi - lo]}
        self.store = store
        self.queue = deque()
        self.in_queue = [False] * P.num_blocks
        if P.num_blocks:
            keep = max(range(P.num_blocks), key=lambda b: (P.size(b), -b))
            for b in range(P.num_blocks):
                if b != keep:
                    self._enqueue(b)
        if self.singleton_opt:
            for b in range(P.num_blocks):
                if P.size(b) == 1:
                    self._retire(P.first(b))
        self.stats.initial_blocks = P.num_blocks

    def _enqueue(self, b):
        in_queue = self.in_queue
        while len(in_queue) <= b:
            in_queue.append(False)
        if not in_queue[b]:
            in_queue[b] = True
            self.queue.append(b)

    def _retire(self, x):
        self.inert[x] = True
        self.store[x] = None

    # -- main loop -----------------------------------------------------------

    def run(self):
        t0 = time.perf_counter()
        self.initialize()
        t1 = time.perf_counter()
        queue = self.queue
        while queue:
            s = queue.popleft()
            self.in_queue[s] = False
            self.split_step(s)
            if self.debug:
                self.audit()
        t2 = time.perf_counter()
        self.stats.t_init = t1 - t0
        self.stats.t_refine = t2 - t1
        self.stats.final_blocks = self.P.num_blocks
        return self

    def split_step(self, S):
        P, Q = self.P, self.Q
        enc = self.enc
        members = P.members(S)
        B = Q.blk[members[0]]
        if Q.size(B) == len(members):
            return
        for y in members:
            Q.mark(y)
        new_q = Q.split_marked(B)
        self.stats.splitters += 1

        # labels of edges into S, per predecessor, in first-touch order
        inert = self.inert
        in_start, in_source, in_label = enc.in_start, enc.in_source, enc.in_label
        labels = {}
        for y in members:
            for k in range(in_start[y], in_start[y + 1]):
                x = in_source[k]
                if inert[x]:
                    continue
                got = labels.get(x)
                if got is None:
                    labels[x] = [in_label[k]]
                else:
                    got.append(in_label[k])
        if not labels:
            return

        store = self.store
        ifaces = self.ifaces
        sort_of = enc.sort_of
        blk = P.blk

        # split value of states of each touched block that have no edge into S
        touched = {}
        for x in labels:
            d = blk[x]
            if d not in touched:
                w_old = store[x][B][0]
                touched[d] = ifaces[sort_of[x]].idle_split(w_old)
        if self.debug:
            for x in labels:
                w_old = store[x][B][0]
                iface = ifaces[sort_of[x]]
                if iface.update((), w_old)[2] != w_old:
                    raise InvariantError(f"state {x}: empty update changed the weight")
                if iface.update((), w_old)[1] != touched[blk[x]]:
                    raise InvariantError(f"empty update differs within block {blk[x]}")

        volume = 0
        split_value = {}
        for x, lab in labels.items():
            entry = store[x][B]
            w, cnt = entry
            ws, v3, wrest = ifaces[sort_of[x]].update(lab, w, consume=True)
            k = len(lab)
            volume += k
            st = store[x]
            st[new_q] = [ws, k]
            if cnt > k:
                entry[0] = wrest
                entry[1] = cnt - k
            elif cnt == k:
                del st[B]
            else:
                raise InvariantError(f"state {x}: {k} edges into S but only {cnt} into B")
            split_value[x] = v3
        self.stats.label_volume += volume
        self.stats.update_calls += len(labels)

        groups_of = {}
        for x, v3 in split_value.items():
            d = blk[x]
            if v3 != touched[d]:
                groups_of.setdefault(d, {}).setdefault(v3, []).append(x)

        for d, groups in groups_of.items():
            parts = [d]
            for group in groups.values():
                for x in group:
                    P.mark(x)
                nb = P.split_marked(d)
                if nb is not None:
                    parts.append(nb)
            if len(parts) == 1:
                continue
            if d < len(self.in_queue) and self.in_queue[d]:
                for b in parts[1:]:
                    self._enqueue(b)
            else:
                keep = max(parts, key=lambda b: (P.size(b), -b))
                for b in parts:
                    if b != keep:
                        self._enqueue(b)
            if self.singleton_opt:
                for b in parts:
                    if P.size(b) == 1:
                        self._retire(P.first(b))

    # -- results and checks ------------------------------------------------

    def original_blocks(self):
        P = self.P
        n0 = self.enc.n_original
        blocks = []
        for b in range(P.num_blocks):
            members = P.members(b)
            if members and members[0] < n0:
                blocks.append(sorted(members))
            elif any(x < n0 for x in members):
                raise InvariantError(f"block {b} mixes original and intermediate states")
        blocks.sort(key=lambda bl: bl[0])
        return blocks

    def audit(self):
        """Full consistency check; quadratic-ish, for tests only."""
        P, Q, enc = self.P, self.Q, self.enc
        P.audit()
        Q.audit()
        for b in range(P.num_blocks):
            members = P.members(b)
            qs = {Q.blk[x] for x in members}
            if len(qs) != 1:
                raise InvariantError(f"P-block {b} is not inside one Q-block")
            if len({enc.fingerprint(x) for x in members}) != 1:
                raise InvariantError(f"P-block {b} mixes fingerprints")
        for x in range(enc.n):
            if self.inert[x]:
                if self.singleton_opt and P.size(P.blk[x]) != 1:
                    raise InvariantError(f"inert state {x} is not a singleton")
                continue
            counts = {}
            for _, y in enc.edges(x):
                qb = Q.blk[y]
                counts[qb] = counts.get(qb, 0) + 1
            have = {qb: e[1] for qb, e in (self.store[x] or {}).items()}
            if have != counts:
                raise InvariantError(f"state {x}: stored edge counts {have} != {counts}")
        for b, flag in enumerate(self.in_queue):
            if flag and b >= P.num_blocks:
                raise InvariantError(f"queued block {b} does not exist")


def minimize(enc, ifaces=None, singleton_opt=True, debug_audits=False,
             force_generic_monoid=False) -> MinimizeResult:
    """Behavioural-equivalence classes of the original states of ``enc``.

    Blocks are ordered by their smallest state; states within a block are in
    declaration order.
    """
    r = Refiner(enc, ifaces, singleton_opt, debug_audits, force_generic_monoid).run()
    return MinimizeResult(r.original_blocks(), r.stats, r.P)

"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 internal invariant
failure, 3 engine/oracle mismatch.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time

from . import monoid as M
from .oracle import (check_coherence, coherence_targets, naive_minimize,
                     random_coalgebra)
from .partition import RefinablePartition
from .refine import minimize
from .sumbag import InvariantError, SumBag
from .syntax import flatten, format_coalgebra, parse_file, quotient
from .term import ParseError, format_term, parse_functor
from .wta import (default_symbols, dense_random_wta, format_wta, is_wta_text,
                  parse_wta, random_wta, wta_to_coalgebra)

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT, EXIT_MISMATCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def load_input(path, ignore_outputs=False):
    """Symbolic coalgebra of a coalgebra file or a WTA file."""
    text = _read(path)
    try:
        if is_wta_text(text):
            return wta_to_coalgebra(parse_wta(text), ignore_outputs)
        return parse_file(text)
    except ParseError as exc:
        exc.path = "<stdin>" if path == "-" else path
        raise


def format_blocks(blocks, names):
    return "".join(f"block {i}: {' '.join(names[s] for s in b)}\n" for i, b in enumerate(blocks))


def cmd_minimize(args):
    t0 = time.perf_counter()
    sym = load_input(args.file, args.ignore_outputs)
    enc = flatten(sym)
    t_parse = time.perf_counter() - t0
    result = minimize(enc, singleton_opt=not args.no_singleton_opt,
                      debug_audits=args.debug_audits,
                      force_generic_monoid=args.force_generic_monoid)
    if args.debug_audits:
        enc.audit()
    names = sym.names
    if args.partition:
        index = result.block_index()
        _write(args.partition, "".join(f"{names[s]}: {index[s]}\n" for s in range(len(names))))
    if args.coalgebra:
        _write(args.coalgebra, format_coalgebra(quotient(sym, result.blocks)))
    if not args.partition and not args.coalgebra:
        sys.stdout.write(format_blocks(result.blocks, names))
    if args.stats:
        st = result.stats
        print(json.dumps({
            "n": enc.n_original, "nFlat": enc.n, "m": enc.m,
            "initialBlocks": st.initial_blocks, "finalBlocks": st.final_blocks,
            "blocks": len(result.blocks),
            "tParse": round(t_parse, 6), "tInit": round(st.t_init, 6),
            "tRefine": round(st.t_refine, 6),
            "labelVolume": st.label_volume,
        }), file=sys.stderr)
    return EXIT_OK


def cmd_check(args):
    sym = load_input(args.file, args.ignore_outputs)
    enc = flatten(sym)
    engine = minimize(enc, force_generic_monoid=args.force_generic_monoid).blocks
    oracle = naive_minimize(enc)
    if engine != oracle:
        print("mismatch between engine and oracle", file=sys.stderr)
        print("engine:\n" + format_blocks(engine, sym.names), file=sys.stderr)
        print("oracle:\n" + format_blocks(oracle, sym.names), file=sys.stderr)
        return EXIT_MISMATCH
    print(f"ok: {len(engine)} blocks, engine and oracle agree")
    return EXIT_OK


def _monoid(token):
    if token not in M.MONOIDS:
        raise UsageError(f"unknown monoid {token!r}; choose from {', '.join(M.MONOIDS)}")
    return M.MONOIDS[token]


def cmd_wta(args):
    m = _monoid(args.monoid)
    symbols = default_symbols(args.symbols, args.rank)
    if args.kind == "random":
        w = random_wta(args.states, symbols, m, args.per_state, args.weights, args.seed,
                       mixed_rank=args.mixed_rank)
    else:
        w = dense_random_wta(args.states, symbols, m, args.zero_prob, args.seed,
                             args.weights, args.cap)
    _write(args.output, format_wta(w))
    return EXIT_OK


SELFTEST_FUNCTORS = ["P X", "B X", "DX", "Z^X", "(N,max)^X", "2 x X^{a,b}", "P P X",
                     "D(N x P X x B X)", "Z^(4 x X^3)", "(N,max)^(4 x X^3)"]


def cmd_selftest(args):
    failed = False
    for iface in coherence_targets():
        report = check_coherence(iface, args.trials, args.seed)
        print(report)
        failed |= not report.ok
    rng = random.Random(args.seed)
    bag = SumBag(M.NAT_MAX)
    shadow = {}
    for _ in range(2000):
        e = rng.randint(1, 30)
        if rng.random() < 0.6:
            bag.insert(e)
            shadow[e] = shadow.get(e, 0) + 1
        elif shadow.get(e):
            bag.remove(e, 1, strict=True)
            shadow[e] -= 1
    bag.audit()
    ok = bag.total() == max((e for e, k in shadow.items() if k), default=0)
    print(f"sumbag: {'ok' if ok else 'total mismatch'}")
    failed |= not ok
    part = RefinablePartition(50)
    for _ in range(200):
        b = rng.randrange(part.num_blocks)
        for s in part.members(b):
            if rng.random() < 0.4:
                part.mark(s)
        part.split_marked(b)
    part.audit()
    print("partition: ok")
    mismatches = 0
    for f in SELFTEST_FUNCTORS:
        t = parse_functor(f)
        bad = 0
        for seed in range(args.instances):
            enc = flatten(random_coalgebra(t, 1 + seed % 20, seed=args.seed * 1000 + seed,
                                           copies=1 + seed % 3))
            if minimize(enc, debug_audits=True).blocks != naive_minimize(enc):
                bad += 1
        print(f"oracle {format_term(t)}: {'ok' if not bad else f'{bad} mismatches'}")
        mismatches += bad
    if mismatches:
        return EXIT_MISMATCH
    return EXIT_INVARIANT if failed else EXIT_OK


def build_parser():
    p = _Parser(prog="coalgmin", description="Minimize coalgebras by generic partition refinement.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    mn = sub.add_parser("minimize", help="minimize a coalgebra or WTA file")
    mn.add_argument("file", help="input file ('-' for stdin)")
    mn.add_argument("--partition", metavar="OUT", help="write 'state: block' lines to OUT")
    mn.add_argument("--coalgebra", metavar="OUT", help="write the quotient coalgebra to OUT")
    mn.add_argument("--stats", action="store_true", help="print run statistics as JSON on stderr")
    mn.add_argument("--no-singleton-opt", action="store_true",
                    help="keep updating weights of states in singleton blocks")
    mn.add_argument("--force-generic-monoid", action="store_true",
                    help="use the generic monoid interface for group and cancellative weights")
    mn.add_argument("--ignore-outputs", action="store_true",
                    help="WTA input: drop output weights (plain backward bisimulation)")
    mn.add_argument("--debug-audits", action="store_true", help="run consistency audits after every step")
    mn.set_defaults(run=cmd_minimize)

    ck = sub.add_parser("check", help="compare the engine against the naive oracle")
    ck.add_argument("file")
    ck.add_argument("--force-generic-monoid", action="store_true")
    ck.add_argument("--ignore-outputs", action="store_true")
    ck.set_defaults(run=cmd_check)

    wt = sub.add_parser("wta", help="generate a random weighted tree automaton")
    wt.add_argument("kind", choices=["random", "dense"])
    wt.add_argument("--states", type=int, required=True)
    wt.add_argument("--symbols", type=int, default=4, help="number of symbols (default 4)")
    wt.add_argument("--rank", type=int, default=5, help="arity of every symbol (default 5)")
    wt.add_argument("--monoid", default="(N,max)", help="Z, R, N+, (N,max), W64 or 2")
    wt.add_argument("--seed", type=int, default=0)
    wt.add_argument("--weights", type=int, default=50, help="distinct weights (default 50)")
    wt.add_argument("--per-state", type=int, default=50, help="random: transitions per state")
    wt.add_argument("--mixed-rank", action="store_true", help="random: use symbols of every rank")
    wt.add_argument("--zero-prob", type=float, default=0.7, help="dense: probability of weight 0")
    wt.add_argument("--cap", type=int, default=1_000_000, help="dense: max candidate transitions")
    wt.add_argument("-o", "--output", default="-")
    wt.set_defaults(run=cmd_wta)

    st = sub.add_parser("selftest", help="coherence checks and oracle comparisons")
    st.add_argument("--trials", type=int, default=1000)
    st.add_argument("--instances", type=int, default=20)
    st.add_argument("--seed", type=int, default=0)
    st.set_defaults(run=cmd_selftest)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.run(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except ParseError as exc:
        where = getattr(exc, "path", None)
        prefix = f"{where}: " if where else ""
        print(f"{prefix}parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

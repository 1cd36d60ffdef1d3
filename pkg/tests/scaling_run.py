"""Run one random-WTA minimization and print timings and counters as JSON.

Executed in a fresh interpreter so that peak memory covers this run only.
usage: scaling_run.py STATES SYMBOLS RANK SEED
"""
import json
import resource
import sys
import time

from coalgmin import monoid as M
from coalgmin.refine import minimize
from coalgmin.syntax import flatten
from coalgmin.wta import default_symbols, random_wta, wta_to_coalgebra


def main():
    n, symbols, rank, seed = map(int, sys.argv[1:5])
    t0 = time.perf_counter()
    w = random_wta(n, default_symbols(symbols, rank), M.NAT_MAX, seed=seed)
    t1 = time.perf_counter()
    enc = flatten(wta_to_coalgebra(w))
    t2 = time.perf_counter()
    result = minimize(enc)
    t3 = time.perf_counter()
    st = result.stats
    print(json.dumps({
        "n": n, "k": w.k, "n_flat": enc.n, "m": enc.m,
        "blocks": len(result.blocks), "label_volume": st.label_volume,
        "t_generate": t1 - t0, "t_flatten": t2 - t1, "t_init": st.t_init,
        "t_refine": st.t_refine, "t_minimize": t3 - t2, "t_total": t3 - t1,
        "peak_mb": resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024,
    }))


if __name__ == "__main__":
    main()

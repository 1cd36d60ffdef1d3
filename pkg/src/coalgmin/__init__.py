"""Generic minimization of coalgebras by partition refinement.

Typical use::

    from coalgmin import load, minimize
    sym, enc = load(open("model.coalg").read())
    result = minimize(enc)
    for block in result.blocks:
        print([sym.names[s] for s in block])
"""
from .refine import MinimizeResult, minimize
from .syntax import flatten, format_coalgebra, load, parse_file, quotient
from .term import ParseError, format_term, parse_functor, plan_decomposition
from .wta import WTA, minimize_wta, parse_wta, wta_to_coalgebra

__all__ = [
    "MinimizeResult", "ParseError", "WTA", "flatten", "format_coalgebra", "format_term",
    "load", "minimize", "minimize_wta", "parse_file", "parse_functor", "parse_wta",
    "plan_decomposition", "quotient", "wta_to_coalgebra",
]
__version__ = "0.1.0"

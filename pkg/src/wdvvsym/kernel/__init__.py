"""Exact symbolic kernel: expression trees, canonical normal forms,
differentiation, substitution, parsing and high-precision evaluation."""

from .gaussq import GaussQ, rational_power
from .nodes import Expr, Jet, Log, Num, Pow, Prod, Root, Sum, Var, as_expr, sqrt
from .normal import (
    NF,
    KernelError,
    NormalizeError,
    Poly,
    is_identically_zero,
    nf_equal,
    normalize,
)
from .calculus import (
    ChainMap,
    SubstitutionError,
    diff,
    diff_n,
    free_vars,
    jets_of,
    partial,
    reify,
    subs_vars,
    substitute,
)
from .parser import ParseError, parse, render
from .numeric import BranchError, UnboundSymbolError, eval_numeric

__all__ = [
    "GaussQ",
    "rational_power",
    "Expr",
    "Num",
    "Var",
    "Jet",
    "Log",
    "Root",
    "Sum",
    "Prod",
    "Pow",
    "as_expr",
    "sqrt",
    "NF",
    "Poly",
    "KernelError",
    "NormalizeError",
    "normalize",
    "is_identically_zero",
    "nf_equal",
    "diff",
    "diff_n",
    "partial",
    "substitute",
    "subs_vars",
    "jets_of",
    "free_vars",
    "reify",
    "ChainMap",
    "SubstitutionError",
    "parse",
    "render",
    "ParseError",
    "eval_numeric",
    "BranchError",
    "UnboundSymbolError",
]

"""Exact differentiation and substitution on expression trees.

`diff` is the total derivative: jet coordinates extend their multi-index
when the differentiation variable is a declared argument, and an optional
chain map supplies derivative rules for similarity variables (so phi(z)
with z = z(x, y) differentiates through the chain).  `partial` is the
coordinate partial that treats every base symbol as independent.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional

from .nodes import (
    Expr,
    Jet,
    Log,
    Num,
    NUM_ONE,
    NUM_ZERO,
    Pow,
    Prod,
    Root,
    Sum,
    Var,
)
from .normal import KernelError, normalize

# chain maps: variable name -> {outer variable name -> d(var)/d(outer) Expr}
ChainMap = Mapping[str, Mapping[str, Expr]]


class SubstitutionError(KernelError):
    pass


def diff(e: Expr, v: str, chain: Optional[ChainMap] = None) -> Expr:
    """Exact total derivative of e with respect to the variable named v.

    Shared subtrees are differentiated once per call, so iterated
    derivatives of heavily shared trees stay polynomial in size."""
    return _diff(e, v, chain, {})


def _diff(e: Expr, v: str, chain: Optional[ChainMap], memo: dict) -> Expr:
    hit = memo.get(id(e))
    if hit is not None and hit[0] is e:
        return hit[1]
    out = _diff_inner(e, v, chain, memo)
    memo[id(e)] = (e, out)
    return out


def _diff_inner(e: Expr, v: str, chain: Optional[ChainMap], memo: dict) -> Expr:
    if isinstance(e, Num):
        return NUM_ZERO
    if isinstance(e, Var):
        if e.name == v:
            return NUM_ONE
        if chain and e.name in chain:
            return chain[e.name].get(v, NUM_ZERO)
        return NUM_ZERO
    if isinstance(e, Jet):
        parts: list[Expr] = []
        if v in e.args:
            parts.append(e.extend(v))
        if chain:
            for a in e.args:
                rule = chain.get(a)
                if rule is None:
                    continue
                inner = rule.get(v, NUM_ZERO)
                if not (isinstance(inner, Num) and inner.value.is_zero()):
                    parts.append(Prod((e.extend(a), inner)))
        if not parts:
            return NUM_ZERO
        return parts[0] if len(parts) == 1 else Sum(parts)
    if isinstance(e, Log):
        du = _diff(e.arg, v, chain, memo)
        if isinstance(du, Num) and du.value.is_zero():
            return NUM_ZERO
        return Prod((du, Pow(e.arg, Fraction(-1))))
    if isinstance(e, Root):
        # lam' = R' * lam / (2 R) keeps the root in the numerator
        dr = _diff(e.square, v, chain, memo)
        if isinstance(dr, Num) and dr.value.is_zero():
            return NUM_ZERO
        return Prod((Num(Fraction(1, 2)), dr, e, Pow(e.square, Fraction(-1))))
    if isinstance(e, Sum):
        return Sum(tuple(_diff(t, v, chain, memo) for t in e.terms))
    if isinstance(e, Prod):
        factors = e.factors
        parts = []
        for i, f in enumerate(factors):
            df = _diff(f, v, chain, memo)
            if isinstance(df, Num) and df.value.is_zero():
                continue
            parts.append(Prod(factors[:i] + (df,) + factors[i + 1:]))
        if not parts:
            return NUM_ZERO
        return parts[0] if len(parts) == 1 else Sum(parts)
    if isinstance(e, Pow):
        db = _diff(e.base, v, chain, memo)
        if isinstance(db, Num) and db.value.is_zero():
            return NUM_ZERO
        return Prod((Num(e.exp), Pow(e.base, e.exp - 1), db))
    raise KernelError(f"cannot differentiate {type(e).__name__}")


def diff_n(e: Expr, v: str, n: int, chain: Optional[ChainMap] = None) -> Expr:
    for _ in range(n):
        e = diff(e, v, chain)
    return e


def partial(e: Expr, coord: Expr) -> Expr:
    """Coordinate partial: coord is a Var or Jet treated as an independent
    coordinate; every other base symbol is held constant."""
    if isinstance(e, (Num,)):
        return NUM_ZERO
    if isinstance(e, (Var, Jet)):
        return NUM_ONE if e == coord else NUM_ZERO
    if isinstance(e, Log):
        du = partial(e.arg, coord)
        if isinstance(du, Num) and du.value.is_zero():
            return NUM_ZERO
        return Prod((du, Pow(e.arg, Fraction(-1))))
    if isinstance(e, Root):
        dr = partial(e.square, coord)
        if isinstance(dr, Num) and dr.value.is_zero():
            return NUM_ZERO
        return Prod((Num(Fraction(1, 2)), dr, e, Pow(e.square, Fraction(-1))))
    if isinstance(e, Sum):
        return Sum(tuple(partial(t, coord) for t in e.terms))
    if isinstance(e, Prod):
        factors = e.factors
        parts = []
        for i, f in enumerate(factors):
            df = partial(f, coord)
            if isinstance(df, Num) and df.value.is_zero():
                continue
            parts.append(Prod(factors[:i] + (df,) + factors[i + 1:]))
        if not parts:
            return NUM_ZERO
        return parts[0] if len(parts) == 1 else Sum(parts)
    if isinstance(e, Pow):
        db = partial(e.base, coord)
        if isinstance(db, Num) and db.value.is_zero():
            return NUM_ZERO
        return Prod((Num(e.exp), Pow(e.base, e.exp - 1), db))
    raise KernelError(f"cannot differentiate {type(e).__name__}")


def substitute(e: Expr, bindings: Mapping[Expr, Expr], strict_funcs: tuple[str, ...] = ()) -> Expr:
    """Simultaneous structural substitution.

    Keys may be Var, Jet, Log or Root nodes.  No re-differentiation happens:
    jet bindings must be supplied for every jet symbol that should change.
    With strict_funcs set, meeting an unbound jet of one of those functions
    raises SubstitutionError.
    """
    return _substitute(e, bindings, strict_funcs, {})


def _substitute(e: Expr, bindings, strict_funcs, memo: dict) -> Expr:
    cached = memo.get(id(e))
    if cached is not None and cached[0] is e:
        return cached[1]
    out = _substitute_inner(e, bindings, strict_funcs, memo)
    memo[id(e)] = (e, out)
    return out


def _substitute_inner(e: Expr, bindings, strict_funcs, memo: dict) -> Expr:
    hit = bindings.get(e)
    if hit is not None:
        return hit
    if isinstance(e, (Num, Var)):
        return e
    if isinstance(e, Jet):
        if e.func in strict_funcs:
            raise SubstitutionError(f"unbound jet symbol {e.shorthand()}")
        return e
    if isinstance(e, Log):
        arg = _substitute(e.arg, bindings, strict_funcs, memo)
        return e if arg is e.arg else Log(arg)
    if isinstance(e, Root):
        sq = _substitute(e.square, bindings, strict_funcs, memo)
        return e if sq is e.square else Root(e.name, sq)
    if isinstance(e, Sum):
        return Sum(tuple(_substitute(t, bindings, strict_funcs, memo) for t in e.terms))
    if isinstance(e, Prod):
        return Prod(tuple(_substitute(f, bindings, strict_funcs, memo) for f in e.factors))
    if isinstance(e, Pow):
        return Pow(_substitute(e.base, bindings, strict_funcs, memo), e.exp)
    raise KernelError(f"cannot substitute in {type(e).__name__}")


def subs_vars(e: Expr, by_name: Mapping[str, Expr]) -> Expr:
    return substitute(e, {Var(k): v for k, v in by_name.items()})


def jets_of(e: Expr) -> set[Jet]:
    out: set[Jet] = set()
    _collect_jets(e, out)
    return out


def _collect_jets(e: Expr, out: set[Jet]):
    if isinstance(e, Jet):
        out.add(e)
    elif isinstance(e, Sum):
        for t in e.terms:
            _collect_jets(t, out)
    elif isinstance(e, Prod):
        for f in e.factors:
            _collect_jets(f, out)
    elif isinstance(e, Pow):
        _collect_jets(e.base, out)
    elif isinstance(e, Log):
        _collect_jets(e.arg, out)
    elif isinstance(e, Root):
        _collect_jets(e.square, out)


def free_vars(e: Expr) -> set[str]:
    out: set[str] = set()
    _collect_vars(e, out)
    return out


def _collect_vars(e: Expr, out: set[str]):
    if isinstance(e, Var):
        out.add(e.name)
    elif isinstance(e, Sum):
        for t in e.terms:
            _collect_vars(t, out)
    elif isinstance(e, Prod):
        for f in e.factors:
            _collect_vars(f, out)
    elif isinstance(e, Pow):
        _collect_vars(e.base, out)
    elif isinstance(e, Log):
        _collect_vars(e.arg, out)
    elif isinstance(e, Root):
        _collect_vars(e.square, out)


def reify(e: Expr) -> Expr:
    """Normalize then rebuild a compact tree; exact identity up to normalize."""
    return normalize(e).to_expr()

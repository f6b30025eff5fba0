"""High-precision numeric evaluation of expression trees via mpmath.

Evaluation walks the raw tree, so it is an independent cross-check of the
symbolic normalizer.  Powers use principal branches; on the all-positive
sampling domain this agrees with the formal branch rules of normalize.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Union

import mpmath as mp

from .gaussq import GaussQ
from .nodes import Expr, Jet, Log, Num, Pow, Prod, Root, Sum, Var
from .normal import KernelError

PointValue = Union[int, Fraction, GaussQ]


class BranchError(KernelError):
    pass


class UnboundSymbolError(KernelError):
    pass


_GUARD_DIGITS = 12


def _to_mpc(v: PointValue) -> mp.mpc:
    if isinstance(v, GaussQ):
        return mp.mpc(
            mp.mpf(v.re.numerator) / mp.mpf(v.re.denominator),
            mp.mpf(v.im.numerator) / mp.mpf(v.im.denominator),
        )
    f = Fraction(v)
    return mp.mpc(mp.mpf(f.numerator) / mp.mpf(f.denominator))


def _is_real(z) -> bool:
    return mp.im(z) == 0


def _power(base, q: Fraction):
    if q.denominator == 1:
        n = int(q)
        if base == 0:
            if n < 0:
                raise BranchError("0 raised to a negative power")
            return mp.mpc(1) if n == 0 else mp.mpc(0)
        return base ** n
    if base == 0:
        if q < 0:
            raise BranchError("0 raised to a negative power")
        return mp.mpc(0)
    if _is_real(base) and mp.re(base) > 0:
        return mp.mpc(mp.power(mp.re(base), mp.mpf(q.numerator) / q.denominator))
    # principal branch for negative or complex bases
    return mp.power(mp.mpc(base), mp.mpf(q.numerator) / q.denominator)


def eval_numeric(e: Expr, point: Mapping[str, PointValue], digits: int = 50) -> mp.mpc:
    """Evaluate e at a rational point to `digits` significant digits.

    Keys of `point` are variable names and jet shorthands (e.g. "f_xx").
    Shared subtrees are evaluated once per call.
    """
    if digits < 1:
        raise ValueError("digits must be positive")
    with mp.workdps(digits + _GUARD_DIGITS):
        vals = {k: _to_mpc(v) for k, v in point.items()}
        result = _eval(e, vals, {})
    return result


def _eval(e: Expr, point: Mapping[str, mp.mpc], memo: dict) -> mp.mpc:
    hit = memo.get(id(e))
    if hit is not None and hit[0] is e:
        return hit[1]
    out = _eval_inner(e, point, memo)
    memo[id(e)] = (e, out)
    return out


def _eval_inner(e: Expr, point: Mapping[str, mp.mpc], memo: dict) -> mp.mpc:
    if isinstance(e, Num):
        return _to_mpc(e.value)
    if isinstance(e, Var):
        try:
            return point[e.name]
        except KeyError:
            raise UnboundSymbolError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Jet):
        key = e.shorthand()
        try:
            return point[key]
        except KeyError:
            raise UnboundSymbolError(f"unbound jet symbol {key!r}") from None
    if isinstance(e, Log):
        a = _eval(e.arg, point, memo)
        if not (_is_real(a) and mp.re(a) > 0):
            raise BranchError(f"log argument not positive: {a}")
        return mp.mpc(mp.log(mp.re(a)))
    if isinstance(e, Root):
        s = _eval(e.square, point, memo)
        if not (_is_real(s) and mp.re(s) > 0):
            raise BranchError(f"root defining square not positive: {s}")
        return mp.mpc(mp.sqrt(mp.re(s)))
    if isinstance(e, Sum):
        return mp.fsum(_eval(t, point, memo) for t in e.terms)
    if isinstance(e, Prod):
        out = mp.mpc(1)
        for f in e.factors:
            out = out * _eval(f, point, memo)
        return out
    if isinstance(e, Pow):
        return _power(_eval(e.base, point, memo), e.exp)
    raise KernelError(f"cannot evaluate {type(e).__name__}")


def abs_value(z) -> mp.mpf:
    return mp.fabs(z)

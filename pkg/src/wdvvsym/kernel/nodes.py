"""Immutable expression trees.

Node kinds: Num (Gaussian rational), Var, Jet (derivative coordinate of an
unknown function), Log and Root atoms, Sum, Prod and Pow with exact rational
exponents.  Construction does light folding only; canonical form lives in
normal.py.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

from .gaussq import GaussQ, ZERO, ONE

Number = Union[int, Fraction, GaussQ]


def _coeff(value: Number) -> GaussQ:
    if isinstance(value, GaussQ):
        return value
    return GaussQ(Fraction(value))


class Expr:
    """Base class; all nodes are immutable and hash/compare structurally."""

    __slots__ = ()

    def __add__(self, other):
        return Sum((self, as_expr(other)))

    def __radd__(self, other):
        return Sum((as_expr(other), self))

    def __sub__(self, other):
        return Sum((self, Prod((NUM_MINUS_ONE, as_expr(other)))))

    def __rsub__(self, other):
        return Sum((as_expr(other), Prod((NUM_MINUS_ONE, self))))

    def __neg__(self):
        return Prod((NUM_MINUS_ONE, self))

    def __mul__(self, other):
        return Prod((self, as_expr(other)))

    def __rmul__(self, other):
        return Prod((as_expr(other), self))

    def __truediv__(self, other):
        return Prod((self, Pow(as_expr(other), Fraction(-1))))

    def __rtruediv__(self, other):
        return Prod((as_expr(other), Pow(self, Fraction(-1))))

    def __pow__(self, q):
        return Pow(self, Fraction(q))

    def __repr__(self):
        from .parser import render

        return render(self)


class Num(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Number):
        object.__setattr__(self, "value", _coeff(value))

    def __setattr__(self, *_):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return isinstance(other, Num) and self.value == other.value

    def __hash__(self):
        return hash(("num", self.value))


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def __setattr__(self, *_):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return isinstance(other, Var) and self.name == other.name

    def __hash__(self):
        return hash(("var", self.name))


class Jet(Expr):
    """Derivative coordinate func_deriv of an unknown function.

    `args` are the declared arguments of the function, `deriv` the sorted
    multi-index of differentiations (mixed partials commute, so sorting
    makes f_xxy and f_yxx the same coordinate).
    """

    __slots__ = ("func", "args", "deriv")

    def __init__(self, func: str, args: Iterable[str], deriv: Iterable[str] = ()):
        args = tuple(args)
        deriv = tuple(sorted(deriv))
        for d in deriv:
            if d not in args:
                raise ValueError(f"jet {func}: derivative variable {d!r} not in args {args}")
        object.__setattr__(self, "func", func)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "deriv", deriv)

    def __setattr__(self, *_):
        raise AttributeError("immutable")

    def extend(self, var: str) -> "Jet":
        return Jet(self.func, self.args, self.deriv + (var,))

    def order(self) -> int:
        return len(self.deriv)

    def shorthand(self) -> str:
        if not self.deriv:
            return self.func
        return self.func + "_" + "".join(self.deriv)

    def __eq__(self, other):
        return (
            isinstance(other, Jet)
            and self.func == other.func
            and self.args == other.args
            and self.deriv == other.deriv
        )

    def __hash__(self):
        return hash(("jet", self.func, self.args, self.deriv))


class Log(Expr):
    """Opaque logarithm atom; never expanded, derivative rule u'/u."""

    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        object.__setattr__(self, "arg", arg)

    def __setattr__(self, *_):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return isinstance(other, Log) and self.arg == other.arg

    def __hash__(self):
        return hash(("log", self.arg))


class Root(Expr):
    """Algebraic root atom: a symbol lam with lam**2 == square.

    `square` must be a rational expression in variables.  At most one Root
    may be active in a verification context.
    """

    __slots__ = ("name", "square")

    def __init__(self, name: str, square: Expr):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "square", square)

    def __setattr__(self, *_):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return isinstance(other, Root) and self.name == other.name and self.square == other.square

    def __hash__(self):
        return hash(("root", self.name, self.square))


class Sum(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Expr]):
        flat: list[Expr] = []
        for t in terms:
            if isinstance(t, Sum):
                flat.extend(t.terms)
            elif isinstance(t, Num) and t.value.is_zero():
                continue
            else:
                flat.append(t)
        object.__setattr__(self, "terms", tuple(flat))

    def __setattr__(self, *_):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return isinstance(other, Sum) and self.terms == other.terms

    def __hash__(self):
        return hash(("sum", self.terms))


class Prod(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: Iterable[Expr]):
        flat: list[Expr] = []
        for fct in factors:
            if isinstance(fct, Prod):
                flat.extend(fct.factors)
            elif isinstance(fct, Num) and fct.value.is_one():
                continue
            else:
                flat.append(fct)
        object.__setattr__(self, "factors", tuple(flat))

    def __setattr__(self, *_):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return isinstance(other, Prod) and self.factors == other.factors

    def __hash__(self):
        return hash(("prod", self.factors))


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: Union[int, Fraction]):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exp", Fraction(exp))

    def __setattr__(self, *_):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return isinstance(other, Pow) and self.base == other.base and self.exp == other.exp

    def __hash__(self):
        return hash(("pow", self.base, self.exp))


NUM_ZERO = Num(ZERO)
NUM_ONE = Num(ONE)
NUM_MINUS_ONE = Num(GaussQ(-1))


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction, GaussQ)):
        return Num(x)
    raise TypeError(f"cannot convert {x!r} to Expr")


def num(x: Number) -> Num:
    return Num(x)


def var(name: str) -> Var:
    return Var(name)


def half() -> Fraction:
    return Fraction(1, 2)


def sqrt(e: Expr) -> Pow:
    return Pow(as_expr(e), Fraction(1, 2))

"""Exact Gaussian rational arithmetic (a + b*i with a, b in Q)."""
from __future__ import annotations

from fractions import Fraction
from typing import Union

Rat = Union[int, Fraction]


class GaussQ:
    """A Gaussian rational, kept in lowest terms by Fraction."""

    __slots__ = ("re", "im")

    def __init__(self, re: Rat = 0, im: Rat = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussQ is immutable")

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_one(self) -> bool:
        return self.re == 1 and self.im == 0

    def is_rational(self) -> bool:
        return self.im == 0

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other: "GaussQ") -> "GaussQ":
        return GaussQ(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussQ") -> "GaussQ":
        return GaussQ(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussQ":
        return GaussQ(-self.re, -self.im)

    def __mul__(self, other: "GaussQ") -> "GaussQ":
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussQ(a * c - b * d, a * d + b * c)

    def inverse(self) -> "GaussQ":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussQ")
        return GaussQ(self.re / n, -self.im / n)

    def __truediv__(self, other: "GaussQ") -> "GaussQ":
        return self * other.inverse()

    def __pow__(self, n: int) -> "GaussQ":
        if not isinstance(n, int):
            raise TypeError("GaussQ power must be an int")
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    # -- comparison / hashing ------------------------------------------
    def __eq__(self, other) -> bool:
        return isinstance(other, GaussQ) and self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def key(self):
        return (self.re, self.im)

    def __repr__(self):
        return f"GaussQ({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "I"
            if self.im == -1:
                return "-I"
            return f"{self.im}*I"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        istr = "I" if mag == 1 else f"{mag}*I"
        return f"{self.re} {sign} {istr}"


ZERO = GaussQ(0)
ONE = GaussQ(1)
I = GaussQ(0, 1)


def _factor_positive(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer by trial division."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def rational_power(c: Fraction, q: Fraction) -> tuple[GaussQ, dict[int, Fraction]]:
    """Exact c**q for rational c: a GaussQ unit times leftover prime surds.

    Returns (coeff, surds) with surds mapping prime -> exponent in (0, 1),
    so that c**q == coeff * prod(p**e for p, e in surds).  Negative c is
    accepted only for half-integer q, contributing the principal-branch
    power of -1 (an exact power of i).
    """
    c = Fraction(c)
    q = Fraction(q)
    if q.denominator == 1:
        if c == 0 and q < 0:
            raise ZeroDivisionError("0 raised to a negative power")
        return GaussQ(c ** int(q)), {}
    if c == 0:
        if q < 0:
            raise ZeroDivisionError("0 raised to a negative power")
        return ZERO, {}
    coeff = ONE
    if c < 0:
        two_q = 2 * q
        if two_q.denominator != 1:
            raise ValueError(f"cannot take ({c})^({q}) exactly: branch not representable")
        coeff = I ** (int(two_q) % 4)
        c = -c
    exps: dict[int, Fraction] = {}
    for p, a in _factor_positive(c.numerator).items():
        exps[p] = exps.get(p, Fraction(0)) + a * q
    for p, a in _factor_positive(c.denominator).items():
        exps[p] = exps.get(p, Fraction(0)) - a * q
    surds: dict[int, Fraction] = {}
    num = Fraction(1)
    for p, e in exps.items():
        whole = Fraction(e.numerator // e.denominator)
        frac = e - whole
        num *= Fraction(p) ** int(whole)
        if frac:
            surds[p] = frac
    return coeff * GaussQ(num), surds

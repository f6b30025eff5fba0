"""Exact functions of a group parameter: finite sums p(eps) * exp(r*eps)
with rational polynomial coefficients and rational rates.  Closed under
addition, multiplication and differentiation; equality is decidable on the
normal form (collect by rate, compare polynomials)."""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping


def _poly_trim(p: dict[int, Fraction]) -> tuple[tuple[int, Fraction], ...]:
    return tuple(sorted((k, c) for k, c in p.items() if c != 0))


class EpsFun:
    """Normal form: map rate r -> polynomial in eps (exponent -> coeff)."""

    __slots__ = ("parts",)

    def __init__(self, parts: Mapping[Fraction, Mapping[int, Fraction]] | tuple = ()):
        if isinstance(parts, tuple):
            object.__setattr__(self, "parts", parts)
            return
        norm = []
        for r, poly in parts.items():
            t = _poly_trim(dict(poly))
            if t:
                norm.append((Fraction(r), t))
        norm.sort()
        object.__setattr__(self, "parts", tuple(norm))

    def __setattr__(self, *_):
        raise AttributeError("immutable")

    # -- constructors -----------------------------------------------------
    @staticmethod
    def const(c: Fraction | int) -> "EpsFun":
        return EpsFun({Fraction(0): {0: Fraction(c)}})

    @staticmethod
    def eps(power: int = 1, coeff: Fraction | int = 1) -> "EpsFun":
        return EpsFun({Fraction(0): {power: Fraction(coeff)}})

    @staticmethod
    def exp(rate: Fraction | int) -> "EpsFun":
        return EpsFun({Fraction(rate): {0: Fraction(1)}})

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.parts

    # -- arithmetic ----------------------------------------------------------
    def add(self, other: "EpsFun") -> "EpsFun":
        acc: dict[Fraction, dict[int, Fraction]] = {}
        for r, poly in self.parts + other.parts:
            dst = acc.setdefault(r, {})
            for k, c in poly:
                dst[k] = dst.get(k, Fraction(0)) + c
        return EpsFun(acc)

    def neg(self) -> "EpsFun":
        return EpsFun({r: {k: -c for k, c in poly} for r, poly in self.parts})

    def sub(self, other: "EpsFun") -> "EpsFun":
        return self.add(other.neg())

    def mul(self, other: "EpsFun") -> "EpsFun":
        acc: dict[Fraction, dict[int, Fraction]] = {}
        for r1, p1 in self.parts:
            for r2, p2 in other.parts:
                dst = acc.setdefault(r1 + r2, {})
                for k1, c1 in p1:
                    for k2, c2 in p2:
                        kk = k1 + k2
                        dst[kk] = dst.get(kk, Fraction(0)) + c1 * c2
        return EpsFun(acc)

    def scale(self, c: Fraction | int) -> "EpsFun":
        c = Fraction(c)
        if c == 0:
            return EPS_ZERO
        return EpsFun({r: {k: cc * c for k, cc in poly} for r, poly in self.parts})

    def deriv(self) -> "EpsFun":
        acc: dict[Fraction, dict[int, Fraction]] = {}
        for r, poly in self.parts:
            dst = acc.setdefault(r, {})
            for k, c in poly:
                if r != 0:
                    dst[k] = dst.get(k, Fraction(0)) + r * c
                if k > 0:
                    dst[k - 1] = dst.get(k - 1, Fraction(0)) + k * c
        return EpsFun(acc)

    def stretch(self, c: Fraction | int) -> "EpsFun":
        """Substitute eps -> c*eps for rational c (group-law checks)."""
        c = Fraction(c)
        acc: dict[Fraction, dict[int, Fraction]] = {}
        for r, poly in self.parts:
            dst = acc.setdefault(r * c, {})
            for k, coeff in poly:
                dst[k] = dst.get(k, Fraction(0)) + coeff * c**k
        return EpsFun(acc)

    def eval(self, value: Fraction):
        """Evaluate at a rational eps using exact arithmetic where possible;
        exponentials with nonzero rate make the result a float."""
        import math

        total = 0.0
        exact = Fraction(0)
        has_exp = False
        for r, poly in self.parts:
            pval = sum(c * value**k for k, c in poly)
            if r == 0:
                exact += pval
            else:
                has_exp = True
                total += float(pval) * math.exp(float(r * value))
        return float(exact) + total if has_exp else exact

    def at_zero(self) -> Fraction:
        out = Fraction(0)
        for _r, poly in self.parts:
            for k, c in poly:
                if k == 0:
                    out += c
        return out

    # -- comparison ------------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, EpsFun) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        return f"EpsFun<{self}>"

    def __str__(self):
        if not self.parts:
            return "0"
        chunks = []
        for r, poly in self.parts:
            for k, c in poly:
                piece = []
                if c == -1 and (k > 0 or r != 0):
                    piece.append("-")
                elif c != 1 or (k == 0 and r == 0):
                    piece.append(str(c) + ("*" if k > 0 or r != 0 else ""))
                if k == 1:
                    piece.append("eps")
                elif k > 1:
                    piece.append(f"eps^{k}")
                if r != 0:
                    if k > 0:
                        piece.append("*")
                    piece.append(f"exp({_rate_str(r)})")
                chunks.append("".join(piece))
        return " + ".join(chunks).replace("+ -", "- ")


def _rate_str(r: Fraction) -> str:
    if r == 1:
        return "eps"
    if r == -1:
        return "-eps"
    if r.denominator == 1:
        return f"{r.numerator}*eps"
    return f"{r.numerator}*eps/{r.denominator}" if r.numerator != 1 else f"eps/{r.denominator}"


EPS_ZERO = EpsFun()
EPS_ONE = EpsFun.const(1)


# ---------------------------------------------------------------------------
# fixture syntax: sums of products of rationals, eps powers and exp(...) with
# a linear rational rate, e.g. "1 - 2*eps" or "exp(3*eps/2)" or "eps^2".
# ---------------------------------------------------------------------------

_EPS_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


class EpsParseError(ValueError):
    pass


class _EpsParser:
    def __init__(self, text: str):
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _EPS_TOKEN.match(text, pos)
            if not m or m.end() == pos:
                if text[pos:].strip():
                    raise EpsParseError(f"bad character {text[pos]!r} in {text!r}")
                break
            for kind in ("int", "name", "op"):
                if m.group(kind) is not None:
                    self.toks.append((kind, m.group(kind)))
                    break
            pos = m.end()
        self.toks.append(("end", ""))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def parse(self) -> EpsFun:
        e = self.sum()
        if self.peek()[0] != "end":
            raise EpsParseError(f"trailing input near {self.peek()[1]!r}")
        return e

    def sum(self) -> EpsFun:
        out = self.product()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                t = self.product()
                out = out.add(t if val == "+" else t.neg())
            else:
                return out

    def product(self) -> EpsFun:
        out = self.unary()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                f = self.unary()
                if val == "*":
                    out = out.mul(f)
                else:
                    out = out.scale(1 / _as_rat(f))
            else:
                return out

    def unary(self) -> EpsFun:
        kind, val = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return self.unary().neg()
        return self.power()

    def power(self) -> EpsFun:
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.next()
            k2, v2 = self.next()
            if k2 != "int":
                raise EpsParseError("expected integer exponent")
            out = EPS_ONE
            for _ in range(int(v2)):
                out = out.mul(base)
            return out
        return base

    def atom(self) -> EpsFun:
        kind, val = self.next()
        if kind == "int":
            return EpsFun.const(int(val))
        if kind == "name" and val == "eps":
            return EpsFun.eps()
        if kind == "name" and val == "exp":
            k, v = self.next()
            if (k, v) != ("op", "("):
                raise EpsParseError("expected ( after exp")
            inner = self.sum()
            k, v = self.next()
            if (k, v) != ("op", ")"):
                raise EpsParseError("expected ) after exp argument")
            rate = _linear_rate(inner)
            return EpsFun.exp(rate)
        if kind == "op" and val == "(":
            inner = self.sum()
            k, v = self.next()
            if (k, v) != ("op", ")"):
                raise EpsParseError("expected )")
            return inner
        raise EpsParseError(f"unexpected token {val!r}")


def _as_rat(e: EpsFun) -> Fraction:
    if e.is_zero():
        return Fraction(0)
    if len(e.parts) == 1 and e.parts[0][0] == 0 and e.parts[0][1] == ((0, e.parts[0][1][0][1]),):
        return e.parts[0][1][0][1]
    raise EpsParseError("expected a rational constant")


def _linear_rate(e: EpsFun) -> Fraction:
    """exp argument must be r*eps exactly."""
    if e.is_zero():
        return Fraction(0)
    if len(e.parts) == 1 and e.parts[0][0] == 0:
        poly = dict(e.parts[0][1])
        if set(poly) <= {1}:
            return poly.get(1, Fraction(0))
    raise EpsParseError("exp argument must be linear in eps")


def parse_epsfun(text: str) -> EpsFun:
    return _EpsParser(text).parse()

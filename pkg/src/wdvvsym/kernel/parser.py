"""Expression grammar: recursive-descent parser and round-trip renderer.

Grammar (whitespace insignificant):
    identifiers  [a-zA-Z_][a-zA-Z0-9_]*
    literals     integers; rationals written p/q via division
    I            imaginary unit
    operators    + - * / ^   (usual precedence, ^ right-associative,
                 rational exponents in parentheses)
    functions    log(e), sqrt(e)
    jets         D(f; x, x, y)  or shorthand f_xxy for declared functions
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping, Optional

from .gaussq import GaussQ
from .nodes import Expr, Jet, Log, Num, Pow, Prod, Root, Sum, Var
from .normal import KernelError, normalize


class ParseError(KernelError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^();,=]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            break
        if m.group("int") is not None:
            out.append(("int", m.group("int"), m.start("int")))
        elif m.group("name") is not None:
            out.append(("name", m.group("name"), m.start("name")))
        else:
            out.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    out.append(("end", "", n))
    return out


class _Parser:
    def __init__(
        self,
        text: str,
        functions: Mapping[str, tuple[str, ...]],
        roots: Mapping[str, Expr],
        strict_symbols: Optional[set[str]],
    ):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.functions = functions
        self.roots = roots
        self.strict = strict_symbols

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op: str):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val!r}", pos)

    def parse(self) -> Expr:
        e = self.sum()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"trailing input {val!r}", pos)
        return e

    def sum(self) -> Expr:
        terms = [self.product()]
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                t = self.product()
                terms.append(t if val == "+" else Prod((Num(-1), t)))
            else:
                break
        return terms[0] if len(terms) == 1 else Sum(terms)

    def product(self) -> Expr:
        factors = [self.unary()]
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                f = self.unary()
                factors.append(f if val == "*" else Pow(f, Fraction(-1)))
            else:
                break
        return factors[0] if len(factors) == 1 else Prod(factors)

    def unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return Prod((Num(-1), self.unary()))
        if kind == "op" and val == "+":
            self.next()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> Fraction:
        kind, val, pos = self.peek()
        if kind == "int":
            self.next()
            return Fraction(int(val))
        if kind == "op" and val == "-":
            self.next()
            kind2, val2, pos2 = self.next()
            if kind2 != "int":
                raise ParseError("expected integer exponent after '-'", pos2)
            return Fraction(-int(val2))
        if kind == "op" and val == "(":
            self.next()
            inner = self.sum()
            self.expect(")")
            nf = normalize(inner)
            if not nf.is_const():
                raise ParseError("exponent must be a rational constant", pos)
            c = nf.const_value()
            if not c.is_rational():
                raise ParseError("exponent must be a rational constant", pos)
            return c.re
        raise ParseError("expected exponent", pos)

    def atom(self) -> Expr:
        kind, val, pos = self.next()
        if kind == "int":
            return Num(int(val))
        if kind == "op" and val == "(":
            e = self.sum()
            self.expect(")")
            return e
        if kind == "name":
            return self.name_atom(val, pos)
        raise ParseError(f"unexpected token {val!r}", pos)

    def name_atom(self, name: str, pos: int) -> Expr:
        if name == "I":
            return Num(GaussQ(0, 1))
        if name == "log":
            self.expect("(")
            arg = self.sum()
            self.expect(")")
            return Log(arg)
        if name == "sqrt":
            self.expect("(")
            arg = self.sum()
            self.expect(")")
            return Pow(arg, Fraction(1, 2))
        if name == "D":
            return self.jet_form(pos)
        if name in self.roots:
            return Root(name, self.roots[name])
        if name in self.functions:
            return Jet(name, self.functions[name], ())
        if "_" in name:
            head, _, tail = name.partition("_")
            if head in self.functions:
                args = self.functions[head]
                if tail and all(ch in args for ch in tail):
                    return Jet(head, args, tuple(tail))
                raise ParseError(f"bad jet suffix {tail!r} for function {head!r}", pos)
        if self.strict is not None and name not in self.strict:
            raise ParseError(f"unknown identifier {name!r}", pos)
        return Var(name)

    def jet_form(self, pos: int) -> Expr:
        self.expect("(")
        kind, fname, fpos = self.next()
        if kind != "name" or fname not in self.functions:
            raise ParseError(f"D(...) needs a declared function, got {fname!r}", fpos)
        deriv: list[str] = []
        kind, val, _ = self.peek()
        if kind == "op" and val == ";":
            self.next()
            while True:
                k2, v2, p2 = self.next()
                if k2 != "name":
                    raise ParseError("expected variable name in D(...)", p2)
                deriv.append(v2)
                k3, v3, p3 = self.next()
                if k3 == "op" and v3 == ",":
                    continue
                if k3 == "op" and v3 == ")":
                    return Jet(fname, self.functions[fname], tuple(deriv))
                raise ParseError("expected ',' or ')' in D(...)", p3)
        self.expect(")")
        return Jet(fname, self.functions[fname], ())


def parse(
    text: str,
    functions: Optional[Mapping[str, tuple[str, ...]]] = None,
    roots: Optional[Mapping[str, Expr]] = None,
    strict_symbols=None,
) -> Expr:
    strict = set(strict_symbols) if strict_symbols is not None else None
    return _Parser(text, functions or {}, roots or {}, strict).parse()


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

_P_SUM, _P_PROD, _P_POW, _P_ATOM = 1, 2, 3, 4


def _wrap(s: str, inner: int, outer: int) -> str:
    return f"({s})" if inner < outer else s


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _num_str(v: GaussQ, prec: int) -> str:
    if v.im == 0:
        s = _frac_str(v.re)
        level = _P_ATOM if v.re >= 0 and v.re.denominator == 1 else _P_PROD
        if v.re < 0:
            level = _P_SUM
        return _wrap(s, level, prec)
    if v.re == 0:
        if v.im == 1:
            return "I"
        if v.im == -1:
            return _wrap("-I", _P_SUM, prec)
        return _wrap(f"{_frac_str(v.im)}*I", _P_PROD if v.im > 0 else _P_SUM, prec)
    return _wrap(f"{_frac_str(v.re)} + {_frac_str(v.im)}*I" if v.im > 0
                 else f"{_frac_str(v.re)} - {_frac_str(-v.im)}*I", _P_SUM, prec)


def render(e: Expr, prec: int = 0) -> str:
    if isinstance(e, Num):
        return _num_str(e.value, prec)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Jet):
        if all(len(a) == 1 for a in e.args):
            return e.shorthand()
        if not e.deriv:
            return f"D({e.func})"
        return f"D({e.func}; {', '.join(e.deriv)})"
    if isinstance(e, Log):
        return f"log({render(e.arg)})"
    if isinstance(e, Root):
        return e.name
    if isinstance(e, Sum):
        if not e.terms:
            return "0"
        parts = [render(t, _P_SUM) for t in e.terms]
        out = parts[0]
        for p in parts[1:]:
            out += " + " + p
        return _wrap(out, _P_SUM, prec)
    if isinstance(e, Prod):
        if not e.factors:
            return "1"
        parts = [render(f, _P_POW) for f in e.factors]
        return _wrap("*".join(parts), _P_PROD, prec)
    if isinstance(e, Pow):
        b = render(e.base, _P_ATOM)
        q = e.exp
        if q.denominator == 1 and q >= 0:
            return _wrap(f"{b}^{q.numerator}", _P_POW, prec)
        return _wrap(f"{b}^({_frac_str(q)})", _P_POW, prec)
    raise KernelError(f"cannot render {type(e).__name__}")

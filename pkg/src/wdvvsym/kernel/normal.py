"""Canonical normal forms.

An expression normalizes to a fraction of generalized Laurent polynomials:
ordered sums of terms, each a Gaussian-rational coefficient times a product
of base**q with q an exact rational.  Bases are prime surds, variables, jet
coordinates, log atoms and at most one algebraic root atom.  Zero-testing is
structural: a normal form is zero iff its numerator has no terms.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

from .gaussq import GaussQ, ZERO, ONE, rational_power
from . import nodes
from .nodes import Expr, Num, Var, Jet, Log, Root, Sum, Prod, Pow


class KernelError(Exception):
    pass


class NormalizeError(KernelError):
    pass


# ---------------------------------------------------------------------------
# bases
# ---------------------------------------------------------------------------

_RANK_PRIME, _RANK_VAR, _RANK_JET, _RANK_LOG, _RANK_ROOT = range(5)


class Base:
    __slots__ = ("rank", "key", "_h")

    def _seal(self):
        object.__setattr__(self, "_h", hash(self.key))

    def __eq__(self, other):
        return self is other or (isinstance(other, Base) and self.key == other.key)

    def __hash__(self):
        return self._h

    def __lt__(self, other):
        return self.key < other.key

    def to_expr(self) -> Expr:
        raise NotImplementedError


class PrimeBase(Base):
    __slots__ = ("p",)

    def __init__(self, p: int):
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "rank", _RANK_PRIME)
        object.__setattr__(self, "key", (_RANK_PRIME, p))
        self._seal()

    def to_expr(self):
        return Num(self.p)


class VarBase(Base):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "rank", _RANK_VAR)
        object.__setattr__(self, "key", (_RANK_VAR, name))
        self._seal()

    def to_expr(self):
        return Var(self.name)


class JetBase(Base):
    __slots__ = ("jet",)

    def __init__(self, jet: Jet):
        object.__setattr__(self, "jet", jet)
        object.__setattr__(self, "rank", _RANK_JET)
        object.__setattr__(self, "key", (_RANK_JET, (jet.func, jet.args, jet.deriv)))
        self._seal()

    def to_expr(self):
        return self.jet


class LogBase(Base):
    __slots__ = ("arg_nf",)

    def __init__(self, arg_nf: "NF"):
        object.__setattr__(self, "arg_nf", arg_nf)
        object.__setattr__(self, "rank", _RANK_LOG)
        object.__setattr__(self, "key", (_RANK_LOG, arg_nf.key()))
        self._seal()

    def to_expr(self):
        return Log(self.arg_nf.to_expr())


class RootBase(Base):
    __slots__ = ("name", "square_poly", "square_expr")

    def __init__(self, name: str, square_poly: "Poly", square_expr: Expr):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "square_poly", square_poly)
        object.__setattr__(self, "square_expr", square_expr)
        object.__setattr__(self, "rank", _RANK_ROOT)
        object.__setattr__(self, "key", (_RANK_ROOT, name, square_poly.key()))
        self._seal()

    def to_expr(self):
        return Root(self.name, self.square_expr)


# ---------------------------------------------------------------------------
# monomials and polynomials
# ---------------------------------------------------------------------------

class Mono:
    """Sorted product of base**exp pairs with cached hash and sort key."""

    __slots__ = ("pairs", "_h", "_sk")

    def __init__(self, pairs: tuple):
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "_h", hash(pairs))
        object.__setattr__(self, "_sk", None)

    def skey(self) -> tuple:
        sk = self._sk
        if sk is None:
            sk = tuple((b.key, e) for b, e in self.pairs)
            object.__setattr__(self, "_sk", sk)
        return sk

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        return self is other or (
            isinstance(other, Mono) and self._h == other._h and self.pairs == other.pairs
        )

    def __repr__(self):
        return f"Mono{self.pairs!r}"


MONO_ONE = Mono(())

_INTERN: dict[tuple, Mono] = {MONO_ONE.pairs: MONO_ONE}
_INTERN_LIMIT = 1 << 20


def mono_from_dict(d: dict[Base, Fraction]) -> Mono:
    pairs = tuple(sorted(((b, e) for b, e in d.items() if e != 0), key=lambda be: be[0].key))
    hit = _INTERN.get(pairs)
    if hit is not None:
        return hit
    m = Mono(pairs)
    if len(_INTERN) < _INTERN_LIMIT:
        _INTERN[pairs] = m
    return m


def mono_mul(a, b) -> dict[Base, Fraction]:
    d = {base: e for base, e in a}
    for base, e in b:
        d[base] = d.get(base, Fraction(0)) + e
        if d[base] == 0:
            del d[base]
    return d


def mono_key(m: Mono) -> tuple:
    return m.skey()


def _mono_cmp(a: Mono, b: Mono) -> int:
    """Sparse lexicographic order on exponent vectors (bases ascending,
    larger exponent first).  Multiplicative, so leading terms multiply and
    exact division runs one step per quotient term."""
    pa, pb = a.pairs, b.pairs
    ia = ib = 0
    na, nb = len(pa), len(pb)
    while ia < na and ib < nb:
        ba, ea = pa[ia]
        bb, eb = pb[ib]
        ka, kb = ba.key, bb.key
        if ka == kb:
            if ea != eb:
                return 1 if ea > eb else -1
            ia += 1
            ib += 1
        elif ka < kb:
            return 1 if ea > 0 else -1
        else:
            return -1 if eb > 0 else 1
    if ia < na:
        return 1 if pa[ia][1] > 0 else -1
    if ib < nb:
        return -1 if pb[ib][1] > 0 else 1
    return 0


def _term_cmp(mc_a, mc_b) -> int:
    return _mono_cmp(mc_a[0], mc_b[0])


from functools import cmp_to_key as _cmp_to_key

_TERM_KEY = _cmp_to_key(_term_cmp)
_MONO_KEY = _cmp_to_key(_mono_cmp)


class Poly:
    """Generalized Laurent polynomial: ordered terms, like terms merged."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Mono, GaussQ] | tuple = ()):
        if isinstance(terms, dict):
            items = [(m, c) for m, c in terms.items() if not c.is_zero()]
            items.sort(key=_TERM_KEY, reverse=True)
            object.__setattr__(self, "terms", tuple(items))
        else:
            object.__setattr__(self, "terms", tuple(terms))

    def __setattr__(self, *_):
        raise AttributeError("immutable")

    # -- constructors ---------------------------------------------------
    @staticmethod
    def const(c: GaussQ) -> "Poly":
        if c.is_zero():
            return POLY_ZERO
        return Poly({MONO_ONE: c})

    # -- predicates ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == MONO_ONE)

    def const_value(self) -> GaussQ:
        if self.is_zero():
            return ZERO
        if not self.is_const():
            raise NormalizeError("polynomial is not constant")
        return self.terms[0][1]

    def leading(self) -> tuple[Mono, GaussQ]:
        return self.terms[0]

    # -- arithmetic -------------------------------------------------------
    def add(self, other: "Poly") -> "Poly":
        d = dict(self.terms)
        for m, c in other.terms:
            acc = d.get(m)
            if acc is None:
                d[m] = c
            else:
                s = acc + c
                if s.is_zero():
                    del d[m]
                else:
                    d[m] = s
        return Poly(d)

    def neg(self) -> "Poly":
        return Poly(tuple((m, -c) for m, c in self.terms))

    def sub(self, other: "Poly") -> "Poly":
        return self.add(other.neg())

    def scale(self, c: GaussQ) -> "Poly":
        if c.is_zero():
            return POLY_ZERO
        if c.is_one():
            return self
        return Poly(tuple((m, k * c) for m, k in self.terms))

    def mul(self, other: "Poly") -> "Poly":
        if self.is_zero() or other.is_zero():
            return POLY_ZERO
        acc: dict[Mono, GaussQ] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                extra, mono, coeff = _reduce_raw(mono_mul(m1, m2), c1 * c2)
                if extra is None:
                    _acc_term(acc, mono, coeff)
                else:
                    contrib = extra.scale(coeff).mul_mono(mono)
                    for m3, c3 in contrib.terms:
                        _acc_term(acc, m3, c3)
        return Poly(acc)

    def mul_mono(self, m: Mono) -> "Poly":
        if m == MONO_ONE:
            return self
        acc: dict[Mono, GaussQ] = {}
        for m1, c1 in self.terms:
            extra, mono, coeff = _reduce_raw(mono_mul(m1, m), c1)
            if extra is None:
                _acc_term(acc, mono, coeff)
            else:
                contrib = extra.scale(coeff).mul_mono(mono)
                for m3, c3 in contrib.terms:
                    _acc_term(acc, m3, c3)
        return Poly(acc)

    def pow_int(self, n: int) -> "Poly":
        if n < 0:
            raise NormalizeError("negative polynomial power")
        out = POLY_ONE
        base = self
        while n:
            if n & 1:
                out = out.mul(base)
            base = base.mul(base) if n > 1 else base
            n >>= 1
        return out

    # -- structure ---------------------------------------------------------
    def bases(self) -> set[Base]:
        out: set[Base] = set()
        for m, _ in self.terms:
            for b, _e in m:
                out.add(b)
        return out

    def key(self):
        return tuple((mono_key(m), c.key()) for m, c in self.terms)

    def to_expr(self) -> Expr:
        if self.is_zero():
            return nodes.NUM_ZERO
        parts = []
        for m, c in self.terms:
            factors: list[Expr] = []
            if not c.is_one() or not m:
                factors.append(Num(c))
            for b, e in m:
                be = b.to_expr()
                factors.append(be if e == 1 else Pow(be, e))
            parts.append(factors[0] if len(factors) == 1 else Prod(factors))
        return parts[0] if len(parts) == 1 else Sum(parts)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        from .parser import render

        return f"Poly<{render(self.to_expr())}>"


POLY_ZERO = Poly(())
POLY_ONE = Poly(((MONO_ONE, ONE),))


def _acc_term(acc: dict[Mono, GaussQ], m: Mono, c: GaussQ):
    old = acc.get(m)
    if old is None:
        acc[m] = c
    else:
        s = old + c
        if s.is_zero():
            del acc[m]
        else:
            acc[m] = s


def _reduce_raw(d: dict[Base, Fraction], coeff: GaussQ):
    """Reduce a raw exponent map: extract integer prime powers, rewrite root
    powers through the defining relation.

    Returns (extra_poly, mono, coeff) where extra_poly is None when the term
    stays a plain term, else a polynomial factor (powers of the root square)
    still to be multiplied in.
    """
    extra: Optional[Poly] = None
    out: dict[Base, Fraction] = {}
    for b, e in d.items():
        if e == 0:
            continue
        if b.rank == _RANK_PRIME:
            whole = e.numerator // e.denominator
            frac = e - whole
            if whole:
                coeff = coeff * GaussQ(Fraction(b.p) ** int(whole))
            if frac:
                out[b] = frac
        elif b.rank == _RANK_ROOT:
            if e.denominator != 1:
                raise NormalizeError(f"fractional power of root {b.name}")
            k = int(e)
            r = k % 2
            m = (k - r) // 2
            if r:
                out[b] = Fraction(1)
            if m:
                if m > 0:
                    p = b.square_poly.pow_int(m)
                else:
                    raise _RootInverse(b, -m)
                extra = p if extra is None else extra.mul(p)
            # m == 0 leaves nothing extra
        else:
            out[b] = e
    return extra, mono_from_dict(out), coeff


class _RootInverse(Exception):
    """Raised when a term needs a negative power of a root square; handled
    at the NF layer by moving the factor to the denominator."""

    def __init__(self, base: RootBase, power: int):
        self.base = base
        self.power = power


# ---------------------------------------------------------------------------
# normal form fractions
# ---------------------------------------------------------------------------

_DIV_STEP_FACTOR = 6


class NF:
    """Fraction of two Poly, denominator nonzero and scale-normalized."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly, canonical: bool = False):
        if den.is_zero():
            raise NormalizeError("zero denominator")
        if not canonical:
            num, den = _canonicalize(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *_):
        raise AttributeError("immutable")

    @staticmethod
    def const(c: GaussQ) -> "NF":
        return NF(Poly.const(c), POLY_ONE, canonical=True)

    @staticmethod
    def from_poly(p: Poly) -> "NF":
        return NF(p, POLY_ONE)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> GaussQ:
        return self.num.const_value() / self.den.const_value()

    def add(self, other: "NF") -> "NF":
        if self.den == other.den:
            return NF(self.num.add(other.num), self.den)
        return NF(
            self.num.mul(other.den).add(other.num.mul(self.den)),
            self.den.mul(other.den),
        )

    def sub(self, other: "NF") -> "NF":
        return self.add(other.neg())

    def neg(self) -> "NF":
        return NF(self.num.neg(), self.den, canonical=True)

    def mul(self, other: "NF") -> "NF":
        return NF(self.num.mul(other.num), self.den.mul(other.den))

    def div(self, other: "NF") -> "NF":
        if other.num.is_zero():
            raise NormalizeError("division by zero expression")
        return NF(self.num.mul(other.den), self.den.mul(other.num))

    def inv(self) -> "NF":
        if self.num.is_zero():
            raise NormalizeError("inverse of zero expression")
        return NF(self.den, self.num)

    def pow_int(self, n: int) -> "NF":
        if n == 0:
            return NF_ONE
        if n < 0:
            return self.inv().pow_int(-n)
        return NF(self.num.pow_int(n), self.den.pow_int(n))

    def equals(self, other: "NF") -> bool:
        return self.num.mul(other.den) == other.num.mul(self.den)

    def bases(self) -> set[Base]:
        return self.num.bases() | self.den.bases()

    def key(self):
        return (self.num.key(), self.den.key())

    def to_expr(self) -> Expr:
        if self.den == POLY_ONE:
            return self.num.to_expr()
        return Prod((self.num.to_expr(), Pow(self.den.to_expr(), Fraction(-1))))

    def __eq__(self, other):
        return isinstance(other, NF) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        from .parser import render

        return f"NF<{render(self.to_expr())}>"


NF_ZERO = NF.const(ZERO)
NF_ONE = NF.const(ONE)


def _mono_content(polys: list[Poly]) -> Mono:
    """Joint monomial content over variable/jet/log bases (Laurent min)."""
    mins: dict[Base, Fraction] = {}
    seen_terms = 0
    for p in polys:
        for m, _c in p.terms:
            seen_terms += 1
            present = {b: e for b, e in m if b.rank in (_RANK_VAR, _RANK_JET, _RANK_LOG)}
            if seen_terms == 1:
                mins.update(present)
            else:
                for b in list(mins):
                    mins[b] = min(mins[b], present.get(b, Fraction(0)))
                for b, e in present.items():
                    if b not in mins and e < 0:
                        mins[b] = e
    return mono_from_dict({b: e for b, e in mins.items() if e != 0})


def _mono_divide(p: Poly, g: Mono) -> Poly:
    inv = tuple((b, -e) for b, e in g)
    return Poly(tuple((mono_from_dict(mono_mul(m, inv)), c) for m, c in p.terms))


def _try_divide(num: Poly, den: Poly) -> Optional[Poly]:
    """Bounded multivariate exact division attempt; None if not exact.

    A successful exact division takes one step per quotient term, so the
    step budget is tied to the expected quotient size; failures bail out
    cheaply and the caller keeps the unreduced fraction (still exact).
    """
    nlen, dlen = len(num.terms), len(den.terms)
    steps = max(48, 4 + 3 * nlen // max(1, dlen))
    q: dict[Mono, GaussQ] = {}
    rem: dict[Mono, GaussQ] = dict(num.terms)
    lm, lc = den.leading()
    lm_inv = tuple((b, -e) for b, e in lm)
    den_terms = den.terms
    while rem:
        steps -= 1
        if steps < 0:
            return None
        rm = max(rem, key=_MONO_KEY)
        rc = rem[rm]
        try:
            extra, qm, qc = _reduce_raw(mono_mul(rm, lm_inv), rc / lc)
        except _RootInverse:
            return None
        if extra is not None:
            return None
        _acc_term(q, qm, qc)
        for m2, c2 in den_terms:
            extra2, mm, cc = _reduce_raw(mono_mul(m2, qm), c2 * qc)
            if extra2 is not None:
                return None
            _acc_term(rem, mm, -cc)
    return Poly(q)


def _split_root(p: Poly):
    """Write p = P + Q*root with P, Q root-free; returns (root, P, Q)."""
    root = None
    p_terms: dict[Mono, GaussQ] = {}
    q_terms: dict[Mono, GaussQ] = {}
    for m, c in p.terms:
        rb = None
        rest: dict[Base, Fraction] = {}
        for b, e in m:
            if b.rank == _RANK_ROOT:
                rb = b
            else:
                rest[b] = e
        if rb is None:
            p_terms[m] = c
        else:
            root = rb
            q_terms[mono_from_dict(rest)] = c
    return root, Poly(p_terms), Poly(q_terms)


def _clear_root_from_den(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Rationalize a denominator containing the root atom by its conjugate."""
    root, p, q = _split_root(den)
    if root is None or q.is_zero():
        return num, den
    conj_terms: dict[Mono, GaussQ] = dict(p.terms)
    for m, c in q.terms:
        d = {b: e for b, e in m}
        d[root] = Fraction(1)
        _acc_term(conj_terms, mono_from_dict(d), -c)
    conj = Poly(conj_terms)
    new_den = den.mul(conj)
    if new_den.is_zero():
        raise NormalizeError("denominator vanishes modulo the root relation")
    return num.mul(conj), new_den


# -- univariate gcd reduction -------------------------------------------------
#
# Fractions produced by iterated chain rules share large polynomial factors
# in one distinguished variable.  When the denominator's polynomial
# structure lives in a single Var base, group terms by their residual
# monomial part, take the exact gcd of all groups over the common exponent
# lattice, and divide it out.  Purely a size reduction; exactness is
# asserted and the unreduced fraction is kept on any failure.


def _upoly_divmod(a: list, b: list):
    """Dense univariate division over the coefficient field."""
    a = list(a)
    db = len(b) - 1
    lead = b[-1]
    q = [ZERO] * max(0, len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c.is_zero():
            continue
        f = c / lead
        q[i - db] = f
        for j in range(db + 1):
            a[i - db + j] = a[i - db + j] - f * b[j]
    while len(a) > 1 and a[-1].is_zero():
        a.pop()
    return q, a


def _upoly_trim(a: list) -> list:
    a = list(a)
    while len(a) > 1 and a[-1].is_zero():
        a.pop()
    return a


def _upoly_gcd(a: list, b: list) -> list:
    a, b = _upoly_trim(a), _upoly_trim(b)
    while not (len(b) == 1 and b[0].is_zero()):
        _q, r = _upoly_divmod(a, b)
        a, b = b, _upoly_trim(r)
    inv = a[-1].inverse()
    return [c * inv for c in a]


def _gcd_reduce(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if len(den.terms) < 2:
        return num, den
    xb = None
    for b in den.bases():
        if b.rank == _RANK_VAR:
            if xb is None:
                xb = b
            elif b != xb:
                return num, den
        elif b.rank in (_RANK_JET, _RANK_LOG, _RANK_ROOT):
            return num, den
    if xb is None:
        return num, den

    def split(p: Poly):
        groups: dict[tuple, dict[Fraction, GaussQ]] = {}
        for m, c in p.terms:
            xe = Fraction(0)
            rest = []
            for b, e in m:
                if b == xb:
                    xe = e
                else:
                    rest.append((b, e))
            groups.setdefault(tuple(rest), {})[xe] = c
        return groups

    gn, gd = split(num), split(den)
    lattice = 1
    for groups in (gn, gd):
        for g in groups.values():
            for e in g:
                lattice = lattice * e.denominator // math.gcd(lattice, e.denominator)

    def to_arr(g: dict[Fraction, GaussQ]):
        idx = {int(e * lattice): c for e, c in g.items()}
        lo, hi = min(idx), max(idx)
        arr = [ZERO] * (hi - lo + 1)
        for k, c in idx.items():
            arr[k - lo] = c
        return lo, arr

    packed = []
    arrs = []
    for groups in (gn, gd):
        part = []
        for key, g in groups.items():
            lo, arr = to_arr(g)
            part.append((key, lo, arr))
            arrs.append(arr)
        packed.append(part)
    g = arrs[0]
    for other in arrs[1:]:
        if len(g) == 1:
            break
        g = _upoly_gcd(g, other)
    while len(g) > 1 and g[0].is_zero():
        g = g[1:]
    if len(g) <= 1:
        return num, den

    def rebuild(part) -> Optional[Poly]:
        acc: dict[Mono, GaussQ] = {}
        for key, lo, arr in part:
            q, r = _upoly_divmod(arr, g)
            if not (len(r) == 1 and r[0].is_zero()):
                return None
            for k, c in enumerate(q):
                if c.is_zero():
                    continue
                exps = {b: e for b, e in key}
                xe = Fraction(lo + k, lattice)
                if xe:
                    exps[xb] = xe
                _acc_term(acc, mono_from_dict(exps), c)
        return Poly(acc)

    new_num = rebuild(packed[0])
    new_den = rebuild(packed[1])
    if new_num is None or new_den is None or new_den.is_zero():
        return num, den
    return new_num, new_den


def _canonicalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if num.is_zero():
        return POLY_ZERO, POLY_ONE
    num, den = _clear_root_from_den(num, den)
    num, den = _gcd_reduce(num, den)
    g = _mono_content([num, den])
    if g != MONO_ONE:
        num = _mono_divide(num, g)
        den = _mono_divide(den, g)
    if len(den.terms) == 1:
        m, c = den.leading()
        if m == MONO_ONE:
            num = num.scale(c.inverse())
        else:
            num = num.scale(c.inverse()).mul_mono(tuple((b, -e) for b, e in m))
        return num, POLY_ONE
    if len(den.terms) <= 160 and len(den.terms) <= len(num.terms) <= 4000:
        q = _try_divide(num, den)
        if q is not None:
            return q, POLY_ONE
    lc = den.leading()[1]
    if not lc.is_one():
        inv = lc.inverse()
        num = num.scale(inv)
        den = den.scale(inv)
    return num, den


# ---------------------------------------------------------------------------
# tree -> NF
# ---------------------------------------------------------------------------


def _atom_base(e: Expr) -> Base:
    if isinstance(e, Log):
        arg = normalize(e.arg)
        if arg.is_zero():
            raise NormalizeError("log of zero")
        return LogBase(arg)
    if isinstance(e, Root):
        sq = normalize(e.square)
        if sq.is_zero():
            raise NormalizeError(f"root {e.name}: defining square is zero")
        if sq.den != POLY_ONE:
            raise NormalizeError(f"root {e.name}: defining square must be a Laurent polynomial")
        for b in sq.num.bases():
            if b.rank in (_RANK_ROOT, _RANK_LOG, _RANK_JET):
                raise NormalizeError(f"root {e.name}: defining square must be rational in variables")
        return RootBase(e.name, sq.num, sq.num.to_expr())
    raise NormalizeError(f"not an atom: {e!r}")


def as_term(e: Expr) -> Optional[tuple[GaussQ, dict[Base, Fraction]]]:
    """View e as coeff * prod(base**exp) without applying root reduction.

    Returns None when e is an honest multi-term sum.
    """
    if isinstance(e, Num):
        return (e.value, {})
    if isinstance(e, Var):
        return (ONE, {VarBase(e.name): Fraction(1)})
    if isinstance(e, Jet):
        return (ONE, {JetBase(e): Fraction(1)})
    if isinstance(e, (Log, Root)):
        return (ONE, {_atom_base(e): Fraction(1)})
    if isinstance(e, Prod):
        coeff = ONE
        exps: dict[Base, Fraction] = {}
        for f in e.factors:
            t = as_term(f)
            if t is None:
                return None
            c, d = t
            coeff = coeff * c
            for b, q in d.items():
                exps[b] = exps.get(b, Fraction(0)) + q
        return (coeff, exps)
    if isinstance(e, Pow):
        t = as_term(e.base)
        if t is None:
            nf = normalize(e.base)
            if nf.den != POLY_ONE or len(nf.num.terms) != 1:
                return None
            m, c = nf.num.leading()
            t = (c, {b: q for b, q in m})
        c, d = t
        if c.is_one():
            coeff, primes = ONE, {}
        elif c.is_rational():
            coeff, primes = rational_power(c.re, e.exp)
        elif e.exp.denominator == 1:
            coeff, primes = c ** int(e.exp), {}
        else:
            raise NormalizeError("fractional power of a non-real coefficient")
        exps: dict[Base, Fraction] = {}
        for p, q in primes.items():
            b = PrimeBase(p)
            exps[b] = exps.get(b, Fraction(0)) + q
        for b, q in d.items():
            exps[b] = exps.get(b, Fraction(0)) + q * e.exp
        return (coeff, exps)
    if isinstance(e, Sum):
        nf = normalize(e)
        if nf.den == POLY_ONE and len(nf.num.terms) == 1:
            m, c = nf.num.leading()
            return (c, {b: q for b, q in m})
        if nf.is_zero():
            return (ZERO, {})
        return None
    raise NormalizeError(f"unknown node {type(e).__name__}")


def _term_to_nf(coeff: GaussQ, exps: dict[Base, Fraction]) -> NF:
    if coeff.is_zero():
        return NF_ZERO
    num_extra: Optional[Poly] = None
    den_extra: Optional[Poly] = None
    while True:
        try:
            extra, mono, c = _reduce_raw(exps, coeff)
            break
        except _RootInverse as ri:
            p = ri.base.square_poly.pow_int(ri.power)
            den_extra = p if den_extra is None else den_extra.mul(p)
            exps = dict(exps)
            exps[ri.base] = exps[ri.base] + 2 * ri.power
    num_extra = extra
    num = Poly({mono: c})
    if num_extra is not None:
        num = num.mul(num_extra)
    return NF(num, den_extra if den_extra is not None else POLY_ONE)


_MAX_CACHE = 1 << 16


def normalize(e: Expr, _cache: Optional[dict] = None) -> NF:
    """Canonical normal form of an expression tree."""
    if _cache is None:
        _cache = {}
    hit = _cache.get(id(e))
    if hit is not None and hit[0] is e:
        return hit[1]
    out = _normalize_inner(e, _cache)
    if len(_cache) < _MAX_CACHE:
        _cache[id(e)] = (e, out)
    return out


def _normalize_inner(e: Expr, cache: dict) -> NF:
    if isinstance(e, Num):
        return NF.const(e.value)
    if isinstance(e, (Var, Jet, Log, Root)):
        c, d = as_term(e)
        return _term_to_nf(c, d)
    if isinstance(e, Sum):
        out = NF_ZERO
        for t in e.terms:
            out = out.add(normalize(t, cache))
        return out
    if isinstance(e, Prod):
        # every factor is normalized even after a zero appears, so a
        # singular factor (zero denominator) is never masked by 0 * (1/0)
        out = NF_ONE
        for f in e.factors:
            out = out.mul(normalize(f, cache))
        return out
    if isinstance(e, Pow):
        if e.exp == 0:
            return NF_ONE
        if e.exp.denominator == 1:
            return normalize(e.base, cache).pow_int(int(e.exp))
        t = as_term(e)
        if t is None:
            raise NormalizeError(
                "fractional power of a multi-term expression; distribute or substitute first"
            )
        return _term_to_nf(*t)
    raise NormalizeError(f"unknown node {type(e).__name__}")


def is_identically_zero(e: Expr) -> bool:
    return normalize(e).is_zero()


def nf_equal(a: Expr, b: Expr) -> bool:
    return normalize(a).equals(normalize(b))

"""Lie point symmetries of the associativity PDE in (x, y, f):
third-order prolongation, determining equations, structure constants and
adjoint actions via exact matrix exponentials."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .epsfun import EPS_ONE, EPS_ZERO, EpsFun
from .kernel import (
    Expr,
    Jet,
    KernelError,
    Num,
    Var,
    diff,
    is_identically_zero,
    normalize,
    partial,
    reify,
    substitute,
)
from .kernel.nodes import NUM_ZERO, Prod, Sum
from .kernel.normal import NF
from . import linalg

F_ARGS = ("x", "y")


def fjet(*deriv: str) -> Jet:
    return Jet("f", F_ARGS, deriv)


F0 = fjet()
X = Var("x")
Y = Var("y")

# residual of the Monge-Ampere-type PDE in f(x, y) and the jet it is solved
# for when working on-shell
EQ2_RESIDUAL: Expr = fjet("x", "x", "x") * fjet("y", "y", "y") - fjet("x", "x", "y") * fjet(
    "x", "y", "y"
) - Num(1)
ONSHELL_JET = fjet("y", "y", "y")
ONSHELL_VALUE: Expr = (Num(1) + fjet("x", "x", "y") * fjet("x", "y", "y")) / fjet("x", "x", "x")


class LieError(KernelError):
    pass


@dataclass(frozen=True)
class VectorField:
    """Point vector field xi d_x + eta d_y + phi d_f with components in
    (x, y, f); no jet coordinates of positive order may appear."""

    xi: Expr
    eta: Expr
    phi: Expr

    def __post_init__(self):
        from .kernel import jets_of

        for comp in (self.xi, self.eta, self.phi):
            for j in jets_of(comp):
                if j.deriv:
                    raise LieError("point vector field components must not contain jets")

    def components(self) -> tuple[Expr, Expr, Expr]:
        return (self.xi, self.eta, self.phi)

    def is_zero(self) -> bool:
        return all(is_identically_zero(c) for c in self.components())

    def apply_to(self, g: Expr) -> Expr:
        """Directional derivative of a function of (x, y, f)."""
        return Sum(
            (
                Prod((self.xi, partial(g, X))),
                Prod((self.eta, partial(g, Y))),
                Prod((self.phi, partial(g, F0))),
            )
        )


def prolong3(v: VectorField) -> dict[tuple[str, ...], Expr]:
    """Prolonged coefficients phi^J for all multi-indices J of order <= 3.

    Recursion: phi^{J,k} = D_k phi^J - (D_k xi) f_{J,x} - (D_k eta) f_{J,y},
    with D_k the total derivative (the bare symbol f differentiates to f_k).
    """
    coeffs: dict[tuple[str, ...], Expr] = {(): v.phi}
    order: list[tuple[str, ...]] = [()]
    for _ in range(3):
        nxt: list[tuple[str, ...]] = []
        for J in order:
            for k in ("x", "y"):
                JK = tuple(sorted(J + (k,)))
                if JK in coeffs:
                    continue
                term = diff(coeffs[J], k)
                term = term - diff(v.xi, k) * fjet(*(J + ("x",)))
                term = term - diff(v.eta, k) * fjet(*(J + ("y",)))
                coeffs[JK] = reify(term)
                nxt.append(JK)
        order = nxt
    return coeffs


def symmetry_residual(v: VectorField) -> NF:
    """Prolonged action on the PDE residual, reduced on-shell; zero iff v is
    a classical point symmetry."""
    pr = prolong3(v)
    third = [("x", "x", "x"), ("x", "x", "y"), ("x", "y", "y"), ("y", "y", "y")]
    acted = v.apply_to(EQ2_RESIDUAL)
    parts = [acted]
    for J in third:
        parts.append(Prod((pr[J], partial(EQ2_RESIDUAL, fjet(*J)))))
    total = Sum(parts)
    onshell = substitute(total, {ONSHELL_JET: ONSHELL_VALUE})
    return normalize(onshell)


# ---------------------------------------------------------------------------
# determining equations
# ---------------------------------------------------------------------------


def _monomials(degree: int) -> list[tuple[int, int, int]]:
    return [
        (i, j, k)
        for i in range(degree + 1)
        for j in range(degree + 1 - i)
        for k in range(degree + 1 - i - j)
    ]


def _mono_expr(ijk: tuple[int, int, int]) -> Expr:
    i, j, k = ijk
    factors: list[Expr] = []
    if i:
        factors.append(X ** Fraction(i))
    if j:
        factors.append(Y ** Fraction(j))
    if k:
        factors.append(F0 ** Fraction(k))
    if not factors:
        return Num(1)
    return Prod(tuple(factors))


@dataclass
class DeterminingResult:
    degree: int
    fields: list[VectorField]

    @property
    def dimension(self) -> int:
        return len(self.fields)


def solve_determining(degree: int) -> DeterminingResult:
    """Solve the linearized symmetry condition for polynomial coefficient
    functions of total degree <= degree.

    The condition is linear in (xi, eta, phi), so the residual is computed
    once per unit monomial field and the exact rational nullspace of the
    coefficient matrix gives the symmetry algebra.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    monos = _monomials(degree)
    units: list[tuple[int, tuple[int, int, int]]] = [
        (slot, m) for slot in range(3) for m in monos
    ]
    residuals = []
    for slot, m in units:
        comps = [NUM_ZERO, NUM_ZERO, NUM_ZERO]
        comps[slot] = _mono_expr(m)
        residuals.append(symmetry_residual(VectorField(*comps)))
    row_keys: dict = {}
    for r in residuals:
        if not r.den.is_const():
            raise LieError("on-shell residual should have constant denominator")
        for mono, _c in r.num.terms:
            row_keys.setdefault(mono, len(row_keys))
    rows = [[Fraction(0)] * len(units) for _ in range(len(row_keys))]
    for col, r in enumerate(residuals):
        den = r.den.const_value()
        if not den.is_rational():
            raise LieError("unexpected non-rational denominator")
        for mono, c in r.num.terms:
            val = c / den
            if not val.is_rational():
                raise LieError("unexpected non-rational coefficient")
            rows[row_keys[mono]][col] = val.re
    basis_vecs = linalg.nullspace(rows, ncols=len(units))
    fields = []
    for vec in basis_vecs:
        comps: list[Expr] = [NUM_ZERO, NUM_ZERO, NUM_ZERO]
        for coef, (slot, m) in zip(vec, units):
            if coef:
                comps[slot] = comps[slot] + Num(coef) * _mono_expr(m)
        fields.append(VectorField(*(reify(c) for c in comps)))
    return DeterminingResult(degree, fields)


def field_coordinates(fields: Sequence[VectorField]) -> tuple[list[list[Fraction]], list]:
    """Exact coordinates of point fields in the monomial space of their
    components (slot, monomial) -> coefficient."""
    keys: dict = {}
    rows = []
    raw = []
    for v in fields:
        entries = {}
        for slot, comp in enumerate(v.components()):
            nf = normalize(comp)
            den = nf.den.const_value()
            for mono, c in nf.num.terms:
                val = c / den
                if not val.is_rational():
                    raise LieError("vector field coordinates must be rational")
                entries[(slot, mono)] = val.re
                keys.setdefault((slot, mono), len(keys))
        raw.append(entries)
    for entries in raw:
        row = [Fraction(0)] * len(keys)
        for k, val in entries.items():
            row[keys[k]] = val
        rows.append(row)
    return rows, list(keys)


def same_span(a: Sequence[VectorField], b: Sequence[VectorField]) -> bool:
    coords, _ = field_coordinates(list(a) + list(b))
    na = len(a)
    ra = linalg.rank(coords[:na])
    rb = linalg.rank(coords[na:])
    rall = linalg.rank(coords)
    return ra == rb == rall


# ---------------------------------------------------------------------------
# brackets and structure constants
# ---------------------------------------------------------------------------


def commutator(v: VectorField, w: VectorField) -> VectorField:
    comps = []
    for vc, wc in zip(v.components(), w.components()):
        comps.append(reify(v.apply_to(wc) - w.apply_to(vc)))
    return VectorField(*comps)


@dataclass
class LieAlgebra:
    basis: list[VectorField]
    c: list[list[list[Fraction]]]  # [i][j][k]: [v_i, v_j] = sum_k c[i][j][k] v_k

    @property
    def dim(self) -> int:
        return len(self.basis)

    def bracket_coeffs(self, i: int, j: int) -> list[Fraction]:
        return self.c[i][j]


def structure_constants(basis: Sequence[VectorField]) -> LieAlgebra:
    """Exact structure constants; raises LieError naming the offending pair
    if some bracket leaves the span."""
    n = len(basis)
    coords, keys = field_coordinates(basis)
    width = len(keys)
    key_index = {k: i for i, k in enumerate(keys)}
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    cols = [list(col) for col in zip(*coords)]  # width x n
    for i in range(n):
        for j in range(i + 1, n):
            br = commutator(basis[i], basis[j])
            vec = [Fraction(0)] * width
            for slot, comp in enumerate(br.components()):
                nf = normalize(comp)
                den = nf.den.const_value()
                for mono, cc in nf.num.terms:
                    val = cc / den
                    k = (slot, mono)
                    if k not in key_index:
                        raise LieError(f"bracket [{i + 1},{j + 1}] leaves the basis span")
                    vec[key_index[k]] = val.re
            sol = linalg.solve(cols, vec)
            if sol is None:
                raise LieError(f"bracket [{i + 1},{j + 1}] leaves the basis span")
            for k in range(n):
                c[i][j][k] = sol[k]
                c[j][i][k] = -sol[k]
    return LieAlgebra(list(basis), c)


def jacobi_violations(alg: LieAlgebra) -> list[tuple[int, int, int]]:
    """Triples (i, j, k) violating the Jacobi identity; empty when exact."""
    n = alg.dim
    c = alg.c
    bad = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for m in range(n):
                    s = Fraction(0)
                    for l in range(n):
                        s += c[j][k][l] * c[i][l][m]
                        s += c[k][i][l] * c[j][l][m]
                        s += c[i][j][l] * c[k][l][m]
                    if s != 0:
                        bad.append((i, j, k))
                        break
    return bad


# ---------------------------------------------------------------------------
# adjoint actions: exact exp(eps ad)
# ---------------------------------------------------------------------------


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _poly_eval(p: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_div_linear(p: list[Fraction], r: Fraction) -> list[Fraction]:
    """Divide p by (x - r); remainder must be zero."""
    out = [Fraction(0)] * (len(p) - 1)
    carry = Fraction(0)
    for i in range(len(p) - 1, 0, -1):
        carry = p[i] + carry * r
        out[i - 1] = carry
    rem = p[0] + carry * r
    if rem != 0:
        raise LieError("nonzero remainder in linear division")
    return out


def charpoly(a: list[list[Fraction]]) -> list[Fraction]:
    """Characteristic polynomial det(xI - A), monic, by Faddeev-LeVerrier."""
    n = len(a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = linalg.mat_identity(n)
    for k in range(1, n + 1):
        am = linalg.mat_mul(a, m)
        tr = sum(am[i][i] for i in range(n))
        ck = -tr / k
        coeffs[n - k] = ck
        m = linalg.mat_add(am, linalg.mat_scale(linalg.mat_identity(n), ck))
    return coeffs


def rational_roots(p: list[Fraction]) -> dict[Fraction, int]:
    """All rational roots with multiplicities; raises if the polynomial has
    any non-rational root (total multiplicity must equal the degree)."""
    work = list(p)
    roots: dict[Fraction, int] = {}
    # strip roots at zero first
    while len(work) > 1 and work[0] == 0:
        roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
        work = work[1:]
    while len(work) > 1:
        denom = 1
        for c in work:
            denom = denom * c.denominator // math.gcd(denom, c.denominator)
        ints = [int(c * denom) for c in work]
        lead, const = ints[-1], ints[0]
        root = None
        for pc in _divisors(abs(const)):
            for qc in _divisors(abs(lead)):
                for cand in (Fraction(pc, qc), Fraction(-pc, qc)):
                    if _poly_eval(work, cand) == 0:
                        root = cand
                        break
                if root is not None:
                    break
            if root is not None:
                break
        if root is None:
            raise LieError("characteristic polynomial has a non-rational root")
        roots[root] = roots.get(root, 0) + 1
        work = _poly_div_linear(work, root)
    return roots


def _divisors(n: int) -> list[int]:
    if n == 0:
        return [1]
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def ad_matrix(alg: LieAlgebra, i: int) -> list[list[Fraction]]:
    """Matrix B with column j the coefficients of [v_j, v_i]; the adjoint
    action is Ad(exp(eps v_i)) = exp(eps B).  The sign convention is pinned
    by the adjoint-table fixtures."""
    n = alg.dim
    b = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        coeffs = alg.c[j][i]
        for k in range(n):
            b[k][j] = coeffs[k]
    return b


def matrix_exp_eps(a: list[list[Fraction]]) -> list[list[EpsFun]]:
    """Exact exp(eps A) for a rational matrix with rational eigenvalues,
    via the commuting semisimple + nilpotent decomposition."""
    n = len(a)
    roots = rational_roots(charpoly(a))
    if sum(roots.values()) != n:
        raise LieError("eigenvalue multiplicities do not sum to the dimension")
    items = sorted(roots.items())
    # q_i = prod_{j != i} (x - r_j)^{a_j}; solve sum u_i q_i = 1 with
    # deg u_i < a_i  (primary-decomposition partition of unity)
    qs = []
    for r, _mult in items:
        q = [Fraction(1)]
        for r2, m2 in items:
            if r2 == r:
                continue
            for _ in range(m2):
                q = _poly_mul(q, [-r2, Fraction(1)])
        qs.append(q)
    cols = []
    blocks = []
    for (r, mult), q in zip(items, qs):
        block = []
        shifted = q
        for _j in range(mult):
            block.append(shifted)
            cols.append(shifted)
            shifted = _poly_mul(shifted, [-r, Fraction(1)])
        blocks.append(block)
    mat_rows = [[(col[d] if d < len(col) else Fraction(0)) for col in cols] for d in range(n)]
    rhs = [Fraction(1)] + [Fraction(0)] * (n - 1)
    sol = linalg.solve(mat_rows, rhs)
    if sol is None:
        raise LieError("partition of unity failed")
    pows = [linalg.mat_identity(n)]
    for _ in range(n):
        pows.append(linalg.mat_mul(a, pows[-1]))

    def poly_of_a(p: list[Fraction]) -> list[list[Fraction]]:
        out = [[Fraction(0)] * n for _ in range(n)]
        for d, cd in enumerate(p):
            if cd:
                out = linalg.mat_add(out, linalg.mat_scale(pows[d], cd))
        return out

    # projector P_i evaluates the solved combination of its basis block at A
    projectors = []
    pos = 0
    for block in blocks:
        combo = [Fraction(0)]
        for coef, colpoly in zip(sol[pos:pos + len(block)], block):
            if coef:
                scaled = [coef * c for c in colpoly]
                width = max(len(combo), len(scaled))
                combo = [
                    (combo[d] if d < len(combo) else Fraction(0))
                    + (scaled[d] if d < len(scaled) else Fraction(0))
                    for d in range(width)
                ]
        pos += len(block)
        projectors.append(poly_of_a(combo))
    total = [[Fraction(0)] * n for _ in range(n)]
    for p in projectors:
        total = linalg.mat_add(total, p)
    if total != linalg.mat_identity(n):
        raise LieError("projectors do not sum to identity")
    s = [[Fraction(0)] * n for _ in range(n)]
    for (r, _mult), p in zip(items, projectors):
        s = linalg.mat_add(s, linalg.mat_scale(p, r))
    nmat = linalg.mat_add(a, linalg.mat_scale(s, Fraction(-1)))
    if not linalg.mat_is_zero(
        linalg.mat_add(linalg.mat_mul(s, nmat), linalg.mat_scale(linalg.mat_mul(nmat, s), Fraction(-1)))
    ):
        raise LieError("semisimple and nilpotent parts do not commute")
    # exp(eps S) = sum_i exp(r_i eps) P_i
    exp_s = [[EPS_ZERO for _ in range(n)] for _ in range(n)]
    for (r, _mult), p in zip(items, projectors):
        for i in range(n):
            for j in range(n):
                if p[i][j]:
                    exp_s[i][j] = exp_s[i][j].add(EpsFun.exp(r).scale(p[i][j]))
    # exp(eps N) with N nilpotent
    exp_n = [[EPS_ZERO for _ in range(n)] for _ in range(n)]
    term = linalg.mat_identity(n)
    fact = 1
    k = 0
    while True:
        for i in range(n):
            for j in range(n):
                if term[i][j]:
                    exp_n[i][j] = exp_n[i][j].add(EpsFun.eps(k, Fraction(term[i][j], fact)))
        term = linalg.mat_mul(nmat, term)
        if linalg.mat_is_zero(term):
            break
        k += 1
        fact *= k
        if k > n:
            raise LieError("nilpotent part is not nilpotent")
    out = [[EPS_ZERO for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = EPS_ZERO
            for t in range(n):
                if exp_s[i][t] is EPS_ZERO or exp_n[t][j] is EPS_ZERO:
                    continue
                acc = acc.add(exp_s[i][t].mul(exp_n[t][j]))
            out[i][j] = acc
    return out


def adjoint_matrix_exp(alg: LieAlgebra, i: int) -> list[list[EpsFun]]:
    return matrix_exp_eps(ad_matrix(alg, i))


def adjoint_action(alg: LieAlgebra, i: int, j: int) -> list[EpsFun]:
    """Ad(exp(eps v_i)) v_j expanded in the basis (column j)."""
    m = adjoint_matrix_exp(alg, i)
    return [m[k][j] for k in range(alg.dim)]


# ---------------------------------------------------------------------------
# optimal-system spot checks
# ---------------------------------------------------------------------------


@dataclass
class SpotCheck:
    name: str
    passed: bool
    detail: str


_SAMPLE_PARAMS = {
    "a": Fraction(2),
    "b": Fraction(3),
    "c": Fraction(5),
    "d": Fraction(7),
    "e": Fraction(11),
}


def optimal_system_spotcheck(alg: LieAlgebra, families, claims) -> list[SpotCheck]:
    """Membership of each representative family in the algebra's span (for
    sampled nonzero parameter values), plus the catalog of normalization
    claims verified exactly on the adjoint exponentials.  This does not
    prove completeness or minimality of the system."""
    from .kernel import subs_vars as _subs

    out: list[SpotCheck] = []
    for fam in families:
        comps: list[Expr] = [NUM_ZERO, NUM_ZERO, NUM_ZERO]
        ok = True
        detail = ""
        for idx, coeff in fam.coeffs.items():
            if not 1 <= idx <= alg.dim:
                ok = False
                detail = f"index {idx} outside the basis"
                break
            val = _subs(coeff, {p: Num(_SAMPLE_PARAMS[p]) for p in fam.parameters})
            base = alg.basis[idx - 1]
            comps = [c + val * b for c, b in zip(comps, base.components())]
        if ok:
            member = VectorField(*(reify(c) for c in comps))
            ok = same_span(alg.basis, list(alg.basis) + [member])
            detail = "lies in the span" if ok else "leaves the span"
        out.append(SpotCheck(f"family/{fam.name}", ok, detail))
    exp_cache: dict[int, list[list[EpsFun]]] = {}
    for cl in claims:
        act = int(cl.require("act"))
        on = int(cl.require("on"))
        if act not in exp_cache:
            exp_cache[act] = adjoint_matrix_exp(alg, act - 1)
        col = [exp_cache[act][k][on - 1] for k in range(alg.dim)]
        if cl.require("kind") == "cancel":
            kills = int(cl.require("kills"))
            entry = col[kills - 1]
            # expect a pure linear term -r*eps with r a nonzero rational,
            # and the acted generator itself fixed by the flow
            rate = entry.parts
            ok = (
                len(rate) == 1
                and rate[0][0] == 0
                and len(rate[0][1]) == 1
                and rate[0][1][0][0] == 1
                and rate[0][1][0][1] != 0
                and col[on - 1] == EPS_ONE
            )
            if ok:
                fixed_col = [exp_cache[act][k][kills - 1] for k in range(alg.dim)]
                ok = fixed_col[kills - 1] == EPS_ONE and all(
                    fixed_col[k].is_zero() for k in range(alg.dim) if k != kills - 1
                )
            r = rate[0][1][0][1] if ok else None
            detail = (
                f"component {kills} shifts linearly (rate {r}); a rational group "
                "parameter cancels it"
                if ok
                else "column does not have the claimed linear form"
            )
            out.append(SpotCheck(f"claim/{cl.name}", ok, detail))
        elif cl.require("kind") == "rescale":
            rate = Fraction(cl.require("rate"))
            expect = EpsFun.exp(rate)
            ok = col[on - 1] == expect and all(
                col[k].is_zero() for k in range(alg.dim) if k != on - 1
            )
            detail = (
                f"pure exponential rescaling at rate {rate}; the coefficient can be "
                "normalized to either sign's unit"
                if ok
                else "column is not a pure exponential rescaling"
            )
            out.append(SpotCheck(f"claim/{cl.name}", ok, detail))
        else:
            out.append(SpotCheck(f"claim/{cl.name}", False, "unknown claim kind"))
    return out

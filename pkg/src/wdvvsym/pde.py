"""Both associativity PDEs, the hodograph relations between them, the Lax
pair compatibility check, the prepotential embeddings and the scalar
quasi-homogeneity checker."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .kernel import (
    Expr,
    Jet,
    KernelError,
    Num,
    Var,
    diff,
    is_identically_zero,
    normalize,
    reify,
    subs_vars,
    substitute,
)
from .kernel.nodes import NUM_ONE, NUM_ZERO
from .kernel.normal import NF
from .lie import EQ2_RESIDUAL, ONSHELL_JET, ONSHELL_VALUE, fjet


def f_jets(f: Expr, max_order: int = 3) -> dict[tuple[int, int], Expr]:
    """Partial derivatives of an explicit f(x, y), keyed by (#x, #y)."""
    out: dict[tuple[int, int], Expr] = {(0, 0): f}
    for n in range(1, max_order + 1):
        for nx in range(n + 1):
            ny = n - nx
            if nx:
                out[(nx, ny)] = reify(diff(out[(nx - 1, ny)], "x"))
            else:
                out[(nx, ny)] = reify(diff(out[(nx, ny - 1)], "y"))
    return out


def F_partials(F: Expr, max_order: int = 3) -> dict[tuple[int, int], Expr]:
    """Partial derivatives of an explicit F(y, t), keyed by (#y, #t)."""
    out: dict[tuple[int, int], Expr] = {(0, 0): F}
    for n in range(1, max_order + 1):
        for ny in range(n + 1):
            nt = n - ny
            if ny:
                out[(ny, nt)] = reify(diff(out[(ny - 1, nt)], "y"))
            else:
                out[(ny, nt)] = reify(diff(out[(ny, nt - 1)], "t"))
    return out


def ferapontov_residual(f: Expr) -> Expr:
    """f_xxx f_yyy - f_xxy f_xyy - 1 for an explicit f(x, y)."""
    j = f_jets(f)
    return j[(3, 0)] * j[(0, 3)] - j[(2, 1)] * j[(1, 2)] - Num(1)


def dubrovin_residual(F: Expr) -> Expr:
    """(F_tyy)^2 - F_ttt - F_tty F_yyy for an explicit F(y, t)."""
    p = F_partials(F)
    return p[(2, 1)] * p[(2, 1)] - p[(0, 3)] - p[(1, 2)] * p[(3, 0)]


def onshell(e: Expr) -> Expr:
    return substitute(e, {ONSHELL_JET: ONSHELL_VALUE})


# ---------------------------------------------------------------------------
# hodograph relations
# ---------------------------------------------------------------------------
#
# The map exchanges f(x, y) with F(y, t) along t = f_xx.  The second-order
# relations are f_xx = t, f_xy = -F_yy, f_yy = F_tt, x = F_ty; the
# derived third-order relations follow by the chain rule at fixed t, which
# for F_yyy contributes an extra -f_xyy term on top of f_xxy^2/f_xxx.


@dataclass(frozen=True)
class HodographLink:
    """Substitution bringing both sides to common coordinates: exactly one
    of x_of (expression for x in (y, t)) or t_of (for t in (x, y))."""

    x_of: Optional[Expr] = None
    t_of: Optional[Expr] = None

    def __post_init__(self):
        if (self.x_of is None) == (self.t_of is None):
            raise KernelError("link must provide exactly one of x(y,t) or t(x,y)")


@dataclass
class RelationReport:
    name: str
    passed: bool
    residual: NF


def _relation_set(ctx: dict) -> list[tuple[str, Expr]]:
    fj = ctx["fjets"]
    Fp = ctx["Fparts"]
    x = ctx["x"]
    t = ctx["t"]
    inv_fxxx = Num(1) / fj[(3, 0)]
    return [
        ("fxx=t", fj[(2, 0)] - t),
        ("fxy=-Fyy", fj[(1, 1)] + Fp[(2, 0)]),
        ("fyy=Ftt", fj[(0, 2)] - Fp[(0, 2)]),
        ("x=Fty", x - Fp[(1, 1)]),
        ("t=fxx", t - fj[(2, 0)]),
        ("Fyyy", Fp[(3, 0)] - (fj[(2, 1)] * fj[(2, 1)] * inv_fxxx - fj[(1, 2)])),
        ("Ftyy", Fp[(2, 1)] + fj[(2, 1)] * inv_fxxx),
        ("Ftty", Fp[(1, 2)] - inv_fxxx),
        ("Fttt", Fp[(0, 3)] - fj[(1, 2)] * inv_fxxx),
    ]


FORWARD_RELATIONS = ("t=fxx", "Fyyy", "Ftyy", "Ftty", "Fttt")
INVERSE_RELATIONS = ("fxx=t", "fxy=-Fyy", "fyy=Ftt", "x=Fty")


def hodograph_check(f: Expr, F: Expr, link: HodographLink) -> list[RelationReport]:
    """Verify all hodograph relations for explicit f(x, y), F(y, t)."""
    fj = f_jets(f)
    Fp = F_partials(F)
    if link.x_of is not None:
        sub = {"x": link.x_of}
        fj = {k: subs_vars(v, sub) for k, v in fj.items()}
        ctx = {"fjets": fj, "Fparts": Fp, "x": link.x_of, "t": Var("t")}
    else:
        sub = {"t": link.t_of}
        Fp = {k: subs_vars(v, sub) for k, v in Fp.items()}
        ctx = {"fjets": fj, "Fparts": Fp, "x": Var("x"), "t": link.t_of}
    out = []
    for name, resid in _relation_set(ctx):
        nf = normalize(resid)
        out.append(RelationReport(name, nf.is_zero(), nf))
    return out


# ---------------------------------------------------------------------------
# Lax pair
# ---------------------------------------------------------------------------


def lax_matrices() -> tuple[list[list[Expr]], list[list[Expr]]]:
    """The two 3x3 coefficient matrices of the overdetermined linear system
    (the spectral-parameter prefactor is split off)."""
    z, o = NUM_ZERO, NUM_ONE
    a = [
        [z, o, z],
        [z, fjet("x", "x", "y"), fjet("x", "x", "x")],
        [o, fjet("x", "y", "y"), fjet("x", "x", "y")],
    ]
    b = [
        [z, z, o],
        [o, fjet("x", "y", "y"), fjet("x", "x", "y")],
        [z, fjet("y", "y", "y"), fjet("x", "y", "y")],
    ]
    return a, b


@dataclass
class LaxReport:
    curl_zero: bool
    commutator_zero_onshell: bool
    curl_residuals: list[list[NF]]
    commutator_residuals: list[list[NF]]

    @property
    def passed(self) -> bool:
        return self.curl_zero and self.commutator_zero_onshell


def lax_compatibility(f: Optional[Expr] = None) -> LaxReport:
    """Zero-curvature check, split by powers of the spectral parameter:
    the first-order part requires A_y = B_x identically in jets, the
    second-order part requires [A, B] = 0 after the on-shell substitution.
    With an explicit f the same residuals are evaluated at its jets."""
    a, b = lax_matrices()
    bind = {}
    if f is not None:
        jd = f_jets(f, max_order=4)
        for (nx, ny), e in jd.items():
            bind[fjet(*("x",) * nx + ("y",) * ny)] = e

    def prep(e: Expr) -> NF:
        if f is not None:
            e = substitute(e, bind)
        return normalize(e)

    curl = []
    for i in range(3):
        row = []
        for j in range(3):
            row.append(prep(diff(a[i][j], "y") - diff(b[i][j], "x")))
        curl.append(row)
    comm = []
    for i in range(3):
        row = []
        for j in range(3):
            acc: Expr = NUM_ZERO
            for k in range(3):
                acc = acc + a[i][k] * b[k][j] - b[i][k] * a[k][j]
            if f is None:
                acc = onshell(acc)
            row.append(prep(acc))
        comm.append(row)
    return LaxReport(
        curl_zero=all(e.is_zero() for r in curl for e in r),
        commutator_zero_onshell=all(e.is_zero() for r in comm for e in r),
        curl_residuals=curl,
        commutator_residuals=comm,
    )


# ---------------------------------------------------------------------------
# prepotential embeddings and the associativity contractions
# ---------------------------------------------------------------------------

T1, T2, T3 = Var("t1"), Var("t2"), Var("t3")


def prepotential_eta11_nonzero(f: Expr) -> Expr:
    """(1/6) t1^3 + t1 t2 t3 + f(t2, t3) with x = t2, y = t3."""
    body = subs_vars(f, {"x": T2, "y": T3})
    return Num(Fraction(1, 6)) * T1 ** Fraction(3) + T1 * T2 * T3 + body


def prepotential_eta11_zero(F: Expr) -> Expr:
    """(1/2) t1^2 t3 + (1/2) t1 t2^2 + F(t2, t3) with y = t2, t = t3."""
    body = subs_vars(F, {"y": T2, "t": T3})
    return Num(Fraction(1, 2)) * T1 ** Fraction(2) * T3 + Num(Fraction(1, 2)) * T1 * T2 ** Fraction(2) + body


@dataclass
class WdvvReport:
    eta: list[list[Fraction]]
    eta_constant: bool
    eta_nondegenerate: bool
    failing_instances: list[tuple[int, int, int, int]]
    checked_instances: int

    @property
    def passed(self) -> bool:
        return self.eta_constant and self.eta_nondegenerate and not self.failing_instances


def _third_derivatives(prep: Expr) -> dict[tuple[int, int, int], Expr]:
    tvars = ("t1", "t2", "t3")
    out = {}
    firsts = [reify(diff(prep, v)) for v in tvars]
    seconds = {}
    for a in range(3):
        for b in range(a, 3):
            seconds[(a, b)] = reify(diff(firsts[a], tvars[b]))
    for a in range(3):
        for b in range(a, 3):
            for c in range(b, 3):
                out[(a, b, c)] = reify(diff(seconds[(a, b)], tvars[c]))
    return out


def _c3(third, a, b, c):
    return third[tuple(sorted((a, b, c)))]


def _eta_from(third) -> tuple[Optional[list[list[Fraction]]], bool]:
    eta = [[Fraction(0)] * 3 for _ in range(3)]
    for a in range(3):
        for b in range(3):
            nf = normalize(_c3(third, 0, a, b))
            if not nf.is_const():
                return None, False
            v = nf.const_value()
            if not v.is_rational():
                return None, False
            eta[a][b] = v.re
    return eta, True


def _inv3(m: list[list[Fraction]]) -> Optional[list[list[Fraction]]]:
    det = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    if det == 0:
        return None
    cof = [[Fraction(0)] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            a = [m[r] for r in range(3) if r != i]
            sub = [[a[0][c] for c in range(3) if c != j], [a[1][c] for c in range(3) if c != j]]
            minor = sub[0][0] * sub[1][1] - sub[0][1] * sub[1][0]
            cof[j][i] = (-1) ** (i + j) * minor / det
    return cof


def wdvv1_check(prep: Expr) -> WdvvReport:
    """All associativity contractions of a concrete prepotential: for every
    index tuple the two eta-contracted products of third derivatives must
    agree.  Redundant tuples are checked anyway."""
    third = _third_derivatives(prep)
    eta, const = _eta_from(third)
    if not const:
        return WdvvReport([], False, False, [], 0)
    inv = _inv3(eta)
    if inv is None:
        return WdvvReport(eta, True, False, [], 0)
    failing = []
    checked = 0
    for a in range(3):
        for b in range(3):
            for g in range(3):
                for d in range(3):
                    acc: Expr = NUM_ZERO
                    for lam in range(3):
                        for mu in range(3):
                            if inv[lam][mu] == 0:
                                continue
                            coef = Num(inv[lam][mu])
                            acc = acc + coef * (
                                _c3(third, a, b, lam) * _c3(third, mu, g, d)
                                - _c3(third, d, b, lam) * _c3(third, mu, g, a)
                            )
                    checked += 1
                    if not is_identically_zero(acc):
                        failing.append((a + 1, b + 1, g + 1, d + 1))
    return WdvvReport(eta, True, True, failing, checked)


def wdvv_reduces_to_scalar_pde(case: str) -> list[tuple[int, int, int, int]]:
    """With the unknown kept symbolic, report which associativity instances
    reduce to (a multiple of) the scalar PDE residual; all others must be
    identities.  case is 'f' or 'F'."""
    if case == "f":
        prep = prepotential_eta11_nonzero(fjet())
        resid = subs_vars(EQ2_RESIDUAL, {})
        jetsub = {
            fjet(): Jet("f", ("t2", "t3"), ()),
        }
        # rebuild jets in (t2, t3)
        prep = substitute(prep, jetsub)
        resid = _map_jets_to(resid, ("t2", "t3"))
    elif case == "F":
        prep = prepotential_eta11_zero(Jet("F", ("y", "t"), ()))
        prep = substitute(prep, {Jet("F", ("y", "t"), ()): Jet("F", ("t2", "t3"), ())})
        FJ = lambda *d: Jet("F", ("t2", "t3"), d)
        resid = FJ("t2", "t2", "t3") * FJ("t2", "t2", "t3") - FJ("t3", "t3", "t3") - FJ(
            "t2", "t3", "t3"
        ) * FJ("t2", "t2", "t2")
    else:
        raise ValueError("case must be 'f' or 'F'")
    third = _third_derivatives(prep)
    eta, const = _eta_from(third)
    if not const:
        raise KernelError("embedding eta is not constant")
    inv = _inv3(eta)
    if inv is None:
        raise KernelError("embedding eta is singular")
    resid_nf = normalize(resid)
    reducing = []
    for a in range(3):
        for b in range(3):
            for g in range(3):
                for d in range(3):
                    acc: Expr = NUM_ZERO
                    for lam in range(3):
                        for mu in range(3):
                            if inv[lam][mu] == 0:
                                continue
                            acc = acc + Num(inv[lam][mu]) * (
                                _c3(third, a, b, lam) * _c3(third, mu, g, d)
                                - _c3(third, d, b, lam) * _c3(third, mu, g, a)
                            )
                    nf = normalize(acc)
                    if nf.is_zero():
                        continue
                    ratio = nf.div(resid_nf)
                    if not ratio.is_const():
                        raise KernelError(
                            f"instance {(a + 1, b + 1, g + 1, d + 1)} is neither zero nor a "
                            "multiple of the scalar residual"
                        )
                    reducing.append((a + 1, b + 1, g + 1, d + 1))
    return reducing


def _map_jets_to(e: Expr, new_args: tuple[str, str]) -> Expr:
    """Rename f(x, y) jets to f(new_args) jets (order-preserving)."""
    mapping = {"x": new_args[0], "y": new_args[1]}
    binds = {}
    for nx in range(4):
        for ny in range(4 - nx):
            old = fjet(*("x",) * nx + ("y",) * ny)
            new = Jet("f", new_args, (mapping["x"],) * nx + (mapping["y"],) * ny)
            binds[old] = new
    return substitute(e, binds)


# ---------------------------------------------------------------------------
# quasi-homogeneity
# ---------------------------------------------------------------------------


@dataclass
class QuasiHomogeneity:
    weights: Optional[dict[str, Fraction]]
    value_weight: Optional[Fraction]

    @property
    def found(self) -> bool:
        return self.weights is not None


def quasi_homogeneity_check(
    F: Expr,
    scale_vars: Sequence[str] = ("y", "t"),
    params: Sequence[str] = (),
    allow_affine: bool = False,
) -> QuasiHomogeneity:
    """Seek rational weights with sum(w_v v F_v) = w_F F (+ optional affine
    polynomial of degree <= 2 in the scaling variables).

    Linear in the unknown weights, so the condition is an exact nullspace
    computation; returns a representative nontrivial solution or a failure
    value (never an error) when none exists.
    """
    from . import linalg

    all_vars = list(scale_vars) + list(params)
    unknown_names = [f"_w_{v}" for v in all_vars] + ["_w_val"]
    euler: Expr = NUM_ZERO
    for v in all_vars:
        euler = euler + Var(f"_w_{v}") * Var(v) * diff(F, v)
    big: Expr = euler - Var("_w_val") * F
    if allow_affine:
        deg2 = []
        sv = list(scale_vars)
        for i in range(3):
            for j in range(3 - i):
                deg2.append((i, j))
        for i, j in deg2:
            name = f"_A_{i}_{j}"
            unknown_names.append(name)
            mono: Expr = Var(name)
            if i:
                mono = mono * Var(sv[0]) ** Fraction(i)
            if j:
                mono = mono * Var(sv[1]) ** Fraction(j)
            big = big - mono
    try:
        nf = normalize(big)
    except KernelError:
        return QuasiHomogeneity(None, None)
    unknown_bases = {name: idx for idx, name in enumerate(unknown_names)}
    rows_map: dict = {}
    entries = []
    for mono, coeff in nf.num.terms:
        hit = None
        rest = []
        for base, exp in mono:
            bname = getattr(base, "name", None)
            if bname in unknown_bases:
                if hit is not None or exp != 1:
                    raise KernelError("weight condition is not linear in the unknowns")
                hit = bname
            else:
                rest.append((base, exp))
        if hit is None:
            return QuasiHomogeneity(None, None)
        key = tuple(rest)
        rows_map.setdefault(key, len(rows_map))
        entries.append((rows_map[key], unknown_bases[hit], coeff))
    ncols = len(unknown_names)
    graw = [[None] * ncols for _ in range(len(rows_map))]
    for r, c, val in entries:
        graw[r][c] = val if graw[r][c] is None else graw[r][c] + val
    rows = []
    for grow in graw:
        scale = next((v for v in grow if v is not None and not v.is_zero()), None)
        if scale is None:
            continue
        inv = scale.inverse()
        row = []
        for v in grow:
            q = (v * inv) if v is not None else None
            if q is not None and not q.is_rational():
                raise KernelError("weight system row is not proportional to a rational row")
            row.append(q.re if q is not None else Fraction(0))
        rows.append(row)
    basis = linalg.nullspace(rows, ncols=ncols)
    nsv = len(scale_vars)
    for vec in basis:
        if any(vec[i] != 0 for i in range(nsv)):
            weights = {v: vec[i] for i, v in enumerate(all_vars)}
            return QuasiHomogeneity(weights, vec[len(all_vars)])
    return QuasiHomogeneity(None, None)

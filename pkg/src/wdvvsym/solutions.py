"""Verification of the solutions table: every row's f solves the first
PDE, F solves the second, and the link satisfies the hodograph relations,
including parametric rows via the exact inverse-Jacobian chain rule."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .kernel import (
    Expr,
    KernelError,
    Num,
    Root,
    Var,
    diff,
    normalize,
    parse,
    reify,
    subs_vars,
    substitute,
)
from .kernel.normal import NF, VarBase
from .fixtures_io import SolutionRow
from .pde import _relation_set, quasi_homogeneity_check, QuasiHomogeneity


class ChartError(KernelError):
    pass


class ChartOps:
    """Derivative operators d/dp, d/dq at fixed other-coordinate, acting on
    expressions in chart coordinates (u, v) through maps p(u, v), q(u, v)."""

    def __init__(self, u: str, v: str, p_map: Expr, q_map: Expr):
        self.u, self.v = u, v
        self.p_u = reify(diff(p_map, u))
        self.p_v = reify(diff(p_map, v))
        self.q_u = reify(diff(q_map, u))
        self.q_v = reify(diff(q_map, v))
        det = self.p_u * self.q_v - self.p_v * self.q_u
        self.det_nf = normalize(det)
        if self.det_nf.is_zero():
            raise ChartError("chart Jacobian determinant is identically zero")
        self.det = self.det_nf.to_expr()

    def d_p(self, g: Expr) -> Expr:
        return reify((self.q_v * diff(g, self.u) - self.q_u * diff(g, self.v)) / self.det)

    def d_q(self, g: Expr) -> Expr:
        return reify((self.p_u * diff(g, self.v) - self.p_v * diff(g, self.u)) / self.det)


def _tower(base: Expr, ops: ChartOps, order: int = 3) -> dict[tuple[int, int], Expr]:
    """All chart-derivatives up to total order, keyed (n_p, n_q)."""
    out = {(0, 0): base}
    for n in range(1, order + 1):
        for np_ in range(n + 1):
            nq = n - np_
            if np_:
                out[(np_, nq)] = ops.d_p(out[(np_ - 1, nq)])
            else:
                out[(np_, nq)] = ops.d_q(out[(np_, nq - 1)])
    return out


def _direct_jets(expr: Expr, vars2: tuple[str, str], maps: dict[str, Expr], order: int = 3):
    """Differentiate in native variables, then pull back through the maps."""
    out = {(0, 0): expr}
    a, b = vars2
    for n in range(1, order + 1):
        for na in range(n + 1):
            nb = n - na
            if na:
                out[(na, nb)] = reify(diff(out[(na - 1, nb)], a))
            else:
                out[(na, nb)] = reify(diff(out[(na, nb - 1)], b))
    sub = {k: v for k, v in maps.items() if not (isinstance(v, Var) and v.name == k)}
    if sub:
        out = {k: subs_vars(v, sub) for k, v in out.items()}
    return out


@dataclass
class Check:
    name: str
    passed: bool
    residual: Optional[NF] = None
    note: str = ""


@dataclass
class RowReport:
    label: str
    checks: list[Check] = field(default_factory=list)
    qh: Optional[QuasiHomogeneity] = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def _row_maps(row: SolutionRow) -> dict[str, Expr]:
    return {"x": row.map_x, "y": row.map_y, "t": row.map_t}


def _apply_constraint(row: SolutionRow, e: Expr) -> Expr:
    if row.constraint is None:
        return e
    return subs_vars(e, {row.constraint[0]: row.constraint[1]})


def row_f_jets(row: SolutionRow) -> dict[tuple[int, int], Expr]:
    maps = _row_maps(row)
    if row.f_mode == "direct":
        jets = _direct_jets(_apply_constraint(row, row.f), ("x", "y"), maps)
    else:
        f_uv = subs_vars(_apply_constraint(row, row.f), {"x": row.map_x, "y": row.map_y})
        ops = ChartOps(row.coords[0], row.coords[1], row.map_x, row.map_y)
        jets = _tower(reify(f_uv), ops)
    return jets


def row_F_partials(row: SolutionRow) -> Optional[dict[tuple[int, int], Expr]]:
    if row.F is None:
        return None
    maps = _row_maps(row)
    Fe = _apply_constraint(row, row.F)
    if row.F_mode == "direct":
        return _direct_jets(Fe, ("y", "t"), maps)
    ops = ChartOps(row.coords[0], row.coords[1], row.map_y, row.map_t)
    return _tower(reify(Fe), ops)


def verify_row(row: SolutionRow, with_qh: bool = True) -> RowReport:
    rep = RowReport(row.label, note=row.note)
    try:
        fj = row_f_jets(row)
    except KernelError as exc:
        rep.checks.append(Check("eq2", False, None, f"error: {exc}"))
        return rep
    eq2 = normalize(fj[(3, 0)] * fj[(0, 3)] - fj[(2, 1)] * fj[(1, 2)] - Num(1))
    rep.checks.append(Check("eq2", eq2.is_zero(), eq2))
    Fp = None
    if row.F is not None:
        try:
            Fp = row_F_partials(row)
        except KernelError as exc:
            rep.checks.append(Check("eq3", False, None, f"error: {exc}"))
    if Fp is not None:
        eq3 = normalize(Fp[(2, 1)] * Fp[(2, 1)] - Fp[(0, 3)] - Fp[(1, 2)] * Fp[(3, 0)])
        rep.checks.append(Check("eq3", eq3.is_zero(), eq3))
        # hodograph relations in the master coordinates
        ctx = {
            "fjets": {k: _apply_constraint(row, v) for k, v in fj.items()},
            "Fparts": Fp,
            "x": _apply_constraint(row, row.map_x),
            "t": _apply_constraint(row, row.map_t),
        }
        for name, resid in _relation_set(ctx):
            nf = normalize(_apply_constraint(row, resid))
            rep.checks.append(Check(f"hodograph/{name}", nf.is_zero(), nf))
        # chain-rule engine consistency: mixed partials computed both ways
        if row.F_mode == "chart":
            ops = ChartOps(row.coords[0], row.coords[1], row.map_y, row.map_t)
            fy = ops.d_p(reify(_apply_constraint(row, row.F)))
            ft = ops.d_q(reify(_apply_constraint(row, row.F)))
            mixed = normalize(ops.d_q(fy) - ops.d_p(ft))
            rep.checks.append(Check("mixed_partials", mixed.is_zero(), mixed))
            rep.checks.append(Check("jacobian_nonzero", not ops.det_nf.is_zero(), ops.det_nf))
    if with_qh and row.quasi_homogeneous:
        rep.qh = row_quasi_homogeneity(row)
        rep.checks.append(Check("quasi_homogeneity", rep.qh.found))
    # the normalization constant is irrelevant: everything must agree at k = 1
    if "k" in row.parameters:
        k1 = _instantiate_row(row, {"k": Fraction(1)})
        sub_rep = verify_row(k1, with_qh=False)
        agree = [c.name for c in rep.checks if c.name.startswith(("eq", "hodograph"))] == [
            c.name for c in sub_rep.checks if c.name.startswith(("eq", "hodograph"))
        ] and all(
            a.passed == b.passed
            for a, b in zip(rep.checks, sub_rep.checks)
            if a.name.startswith(("eq", "hodograph"))
        )
        rep.checks.append(Check("k1_agrees", agree))
    return rep


def _instantiate_row(row: SolutionRow, values: dict[str, Fraction]) -> SolutionRow:
    binds = {k: Num(v) for k, v in values.items()}

    def s(e):
        return substitute(e, {Var(k): v for k, v in binds.items()}) if e is not None else None

    import dataclasses

    return dataclasses.replace(
        row,
        map_x=s(row.map_x),
        map_y=s(row.map_y),
        map_t=s(row.map_t),
        f=s(row.f),
        F=s(row.F),
        constraint=(row.constraint[0], s(row.constraint[1])) if row.constraint else None,
        parameters=tuple(p for p in row.parameters if p not in values),
    )


def row_quasi_homogeneity(row: SolutionRow) -> QuasiHomogeneity:
    """Weights for the second PDE's scaling identity, computed in the row's
    own coordinates: F and the t-map must be jointly graded."""
    if row.F is None:
        return QuasiHomogeneity(None, None)
    if row.F_mode == "direct" and row.coords == ("y", "t"):
        return quasi_homogeneity_check(
            _apply_constraint(row, row.F), ("y", "t"), row.parameters
        )
    # chart form: grade F together with the t-map
    F_uv = _apply_constraint(row, row.F)
    qh_F = quasi_homogeneity_check(F_uv, row.coords, row.parameters)
    if not qh_F.found:
        return qh_F
    qh_t = quasi_homogeneity_check(
        _apply_constraint(row, row.map_t), row.coords, row.parameters
    )
    if not qh_t.found:
        return QuasiHomogeneity(None, None)
    # joint gradedness: solve both weight systems at once
    joint = quasi_homogeneity_check(
        F_uv + Var("_slack") * _apply_constraint(row, row.map_t) ** Fraction(2),
        row.coords,
        tuple(row.parameters) + ("_slack",),
    )
    if not joint.found:
        return QuasiHomogeneity(None, None)
    return joint


def _formal_square(e: Expr) -> Expr:
    """Square with powers doubled in place (branch-formal, positive domain)."""
    from .kernel.nodes import Pow, Prod

    if isinstance(e, Prod):
        return Prod(tuple(_formal_square(f) for f in e.factors))
    if isinstance(e, Pow):
        return Pow(e.base, 2 * e.exp)
    return e * e


def mirror_check(row: SolutionRow, partner: SolutionRow) -> bool:
    """A primed row's f is the x <-> y image of its partner's f."""
    from .kernel import free_vars

    allowed = {"x", "y"} | set(row.parameters) | set(partner.parameters)
    if free_vars(row.f) <= allowed and free_vars(partner.f) <= allowed:
        swap = {Var("x"): Var("y"), Var("y"): Var("x")}
        mirrored = substitute(partner.f, swap)
        try:
            return normalize(row.f - mirrored).is_zero()
        except KernelError:
            # half-integer powers of sums: compare exact squares and fix
            # the sign at a rational sample point
            sq = normalize(_formal_square(row.f) - _formal_square(mirrored))
            if not sq.is_zero():
                return False
            from .kernel import eval_numeric
            import mpmath as mp

            pt = {"x": Fraction(1), "y": Fraction(1), "k": Fraction(1, 2)}
            for p in set(row.parameters) | set(partner.parameters):
                pt.setdefault(p, Fraction(1, 3))
            a = eval_numeric(row.f, pt, 40)
            b = eval_numeric(mirrored, pt, 40)
            return bool(mp.fabs(a - b) < mp.mpf(10) ** (-30))
    # purely parametric pair: compare chart forms under renaming of the
    # chart variables, and the defining maps along with them
    ren = {Var(a): Var(b) for a, b in zip(partner.coords, row.coords)}
    f_ren = substitute(partner.f, ren)
    ok_f = normalize(row.f - f_ren).is_zero()
    x_ren = substitute(partner.map_x, ren)
    ok_map = normalize(row.map_y - x_ren).is_zero()
    return ok_f and ok_map


# ---------------------------------------------------------------------------
# the algebraic-root row: derived link and prepotential polynomials
# ---------------------------------------------------------------------------

ROOT_SQUARE = "1 + alpha/x + beta/x^2 + gamma/x^3"
F1_SHAPE_T = "I*sqrt(2)*y^(3/2)*x^(-9/2)"
F1_SHAPE_F = "I*sqrt(2)*y^(5/2)*x^(-15/2)"


@dataclass
class F1Derivation:
    p4: Expr
    p8: Expr
    t_map: Expr
    F: Expr
    f: Expr
    root: Root


def _poly_in_x(nf: NF, max_deg: int, params: tuple[str, ...]) -> bool:
    if not nf.den.is_const():
        return False
    for mono, _c in nf.num.terms:
        for base, exp in mono:
            if isinstance(base, VarBase):
                if base.name == "x":
                    if exp.denominator != 1 or exp < 0 or exp > max_deg:
                        return False
                elif base.name not in params:
                    return False
            else:
                return False
    return True


_F1_CACHE: list = []


def derive_f1_polynomials() -> F1Derivation:
    """From f = (2/3) i sqrt(2) (x y)^{3/2} lam with lam^2 rational in x,
    compute t = f_xx exactly, extract the degree-4 polynomial from its
    stated shape, and fit the degree-8 polynomial of the partner F by an
    exact linear solve against the hodograph relations."""
    if _F1_CACHE:
        return _F1_CACHE[0]
    square = parse(ROOT_SQUARE)
    lam = Root("lam", square)
    f = parse("2*I*sqrt(2)/3*(x*y)^(3/2)") * lam
    fx = reify(diff(f, "x"))
    fxx = reify(diff(fx, "x"))
    shape_t = parse(F1_SHAPE_T) * lam ** Fraction(-3)
    p4_nf = normalize(fxx / shape_t)
    if not _poly_in_x(p4_nf, 4, ("alpha", "beta", "gamma")):
        raise ChartError("computed link does not match the stated degree-4 shape")
    p4 = p4_nf.to_expr()
    t_map = reify(fxx)
    # Under pure scaling of the second variable (weightless root
    # parameters) the pair is graded with weights 1 on y, 3/2 on t and 5/2
    # on the partner, so the Euler identities integrate the first-order
    # pairing relations in closed form on the (x, y) chart:
    #     F_t = y x + (3/2) t f_yy,
    #     F_y = t x - (2/3) y f_xy,
    #     F   = (2/5) (y F_y + (3/2) t F_t),
    # everything explicit with t = f_xx.
    fxy = reify(diff(reify(diff(f, "x")), "y"))
    fyy = reify(diff(reify(diff(f, "y")), "y"))
    x, y = Var("x"), Var("y")
    F_t = y * x + Num(Fraction(3, 2)) * t_map * fyy
    F_y = t_map * x - Num(Fraction(2, 3)) * y * fxy
    F_closed = reify(Num(Fraction(2, 5)) * (y * F_y + Num(Fraction(3, 2)) * t_map * F_t))
    shape_F = parse(F1_SHAPE_F) * lam ** Fraction(-5)
    param_names = ("alpha", "beta", "gamma")
    p8_nf = normalize(F_closed / shape_F)
    if not _poly_in_x(p8_nf, 8, param_names):
        raise ChartError("integrated partner does not match the stated degree-8 shape")
    p8 = p8_nf.to_expr()
    out = F1Derivation(p4, p8, t_map, F_closed, reify(f), lam)
    _F1_CACHE.append(out)
    return out


F1_SAMPLE_TRIPLES = (
    (Fraction(1, 3), Fraction(1, 5), Fraction(1, 7)),
    (Fraction(1, 2), Fraction(1, 3), Fraction(1, 11)),
    (Fraction(2, 5), Fraction(1, 7), Fraction(3, 5)),
)


def verify_f1_report() -> RowReport:
    """Certificate for the derived algebraic-root row.

    The f side and both polynomial shapes are checked with the root
    parameters fully symbolic; the partner-side relations go through two
    chart levels applied to the explicit first derivatives (cheaper than a
    third-order tower) at exact sampled parameter triples.
    """
    from .pde import ferapontov_residual

    d = derive_f1_polynomials()
    rep = RowReport("F1", note="root parameters sampled on the partner side")
    eq2 = normalize(ferapontov_residual(d.f))
    rep.checks.append(Check("eq2", eq2.is_zero(), eq2))
    x, y = Var("x"), Var("y")
    fj = {
        (1, 1): reify(diff(reify(diff(d.f, "x")), "y")),
        (0, 2): reify(diff(reify(diff(d.f, "y")), "y")),
        (3, 0): reify(diff(reify(diff(reify(diff(d.f, "x")), "x")), "x")),
        (2, 1): reify(diff(reify(diff(reify(diff(d.f, "x")), "x")), "y")),
        (1, 2): reify(diff(reify(diff(reify(diff(d.f, "x")), "y")), "y")),
    }
    F_t = reify(y * x + Num(Fraction(3, 2)) * d.t_map * fj[(0, 2)])
    F_y = reify(d.t_map * x - Num(Fraction(2, 3)) * y * fj[(1, 1)])
    for ai, bi, gi in F1_SAMPLE_TRIPLES:
        binds = {Var("alpha"): Num(ai), Var("beta"): Num(bi), Var("gamma"): Num(gi)}

        def at(e: Expr) -> Expr:
            return substitute(e, binds)

        tag = f"[{ai},{bi},{gi}]"
        ops = ChartOps("x", "y", Var("y"), at(d.t_map))
        Ft_s, Fy_s, F_s = at(F_t), at(F_y), at(d.F)
        grad_t = normalize(ops.d_q(reify(F_s)) - Ft_s)
        grad_y = normalize(ops.d_p(reify(F_s)) - Fy_s)
        rep.checks.append(Check(f"gradient/t{tag}", grad_t.is_zero(), grad_t))
        rep.checks.append(Check(f"gradient/y{tag}", grad_y.is_zero(), grad_y))
        Ftt = reify(ops.d_q(reify(Ft_s)))
        Fty = reify(ops.d_p(reify(Ft_s)))
        Fyt = reify(ops.d_q(reify(Fy_s)))
        Fyy = reify(ops.d_p(reify(Fy_s)))
        rep.checks.append(
            Check(f"mixed_partials{tag}", normalize(Fty - Fyt).is_zero(), normalize(Fty - Fyt))
        )
        rel2 = [
            ("fxy=-Fyy", at(fj[(1, 1)]) + Fyy),
            ("fyy=Ftt", at(fj[(0, 2)]) - Ftt),
            ("x=Fty", x - Fty),
        ]
        for name, resid in rel2:
            nf = normalize(resid)
            rep.checks.append(Check(f"hodograph/{name}{tag}", nf.is_zero(), nf))
        Fttt = reify(ops.d_q(Ftt))
        Ftty = reify(ops.d_p(Ftt))
        Ftyy = reify(ops.d_p(Fty))
        Fyyy = reify(ops.d_p(Fyy))
        eq3 = normalize(Ftyy * Ftyy - Fttt - Ftty * Fyyy)
        rep.checks.append(Check(f"eq3{tag}", eq3.is_zero(), eq3))
        inv_fxxx = Num(1) / at(fj[(3, 0)])
        rel3 = [
            ("Fyyy", Fyyy - (at(fj[(2, 1)]) * at(fj[(2, 1)]) * inv_fxxx - at(fj[(1, 2)]))),
            ("Ftyy", Ftyy + at(fj[(2, 1)]) * inv_fxxx),
            ("Ftty", Ftty - inv_fxxx),
            ("Fttt", Fttt - at(fj[(1, 2)]) * inv_fxxx),
        ]
        for name, resid in rel3:
            nf = normalize(resid)
            rep.checks.append(Check(f"hodograph/{name}{tag}", nf.is_zero(), nf))
    return rep


def f1_row() -> SolutionRow:
    d = derive_f1_polynomials()
    square = parse(ROOT_SQUARE)
    return SolutionRow(
        label="F1",
        coords=("x", "y"),
        map_x=Var("x"),
        map_y=Var("y"),
        map_t=d.t_map,
        f=d.f,
        f_mode="direct",
        F=d.F,
        F_mode="chart",
        parameters=("alpha", "beta", "gamma"),
        root=("lam", square),
        constraint=None,
        mirror_of=None,
        core=False,
        note="link and partner polynomials derived, not transcribed",
        quasi_homogeneous=False,
    )

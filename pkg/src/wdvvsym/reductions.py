"""Symmetry reductions of the associativity PDE to ODEs: exact change of
variables, matching against the reduced-ODE catalog, first integrals,
linearization and explicit ODE solutions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .kernel import (
    Expr,
    Jet,
    KernelError,
    Num,
    Var,
    diff,
    is_identically_zero,
    jets_of,
    normalize,
    partial,
    reify,
    subs_vars,
    substitute,
)
from .kernel.nodes import Log, NUM_ZERO
from .kernel.normal import NF, VarBase, PrimeBase
from .lie import VectorField


def phijet(*deriv: str) -> Jet:
    return Jet("phi", ("z",), deriv)


PHI = phijet()
PHI1 = phijet("z")
PHI2 = phijet("z", "z")
PHI3 = phijet("z", "z", "z")
PHI4 = phijet("z", "z", "z", "z")

X, Y, Z = Var("x"), Var("y"), Var("z")


class ReductionError(KernelError):
    pass


@dataclass
class ReductionCase:
    """A concrete similarity ansatz: f written in (x, y) and jets of phi,
    with chain rules for the similarity variable and an elimination rule
    bringing the reduced residual to (z, parameters)."""

    name: str
    ansatz: Expr
    chain: dict
    solve_var: Optional[str]  # variable eliminated via solve_expr (in z and the other one)
    solve_expr: Optional[Expr]
    generator: Optional[VectorField]
    parameters: tuple[str, ...]


def make_case(name: str, *, mu: Optional[Fraction] = None, ab: Optional[tuple[int, int]] = None,
              mirror: bool = False) -> ReductionCase:
    """Catalog of similarity ansatze, one per optimal-system generator
    family.  Parameters appearing in exponents (mu and the pair (a, b))
    must be given as exact rationals; polynomial parameters stay symbolic.
    """
    f32 = Fraction(3, 2)
    if name == "half_power":
        # scaling in one variable: z is the other variable
        if not mirror:
            ansatz = (X ** Fraction(3) * PHI) ** Fraction(1, 2)
            chain = {"z": {"x": NUM_ZERO, "y": Num(1)}}
            gen = VectorField(X, NUM_ZERO, Num(f32) * fjet0())
            solve = ("y", Z)
        else:
            ansatz = (Y ** Fraction(3) * PHI) ** Fraction(1, 2)
            chain = {"z": {"x": Num(1), "y": NUM_ZERO}}
            gen = VectorField(NUM_ZERO, Y, Num(f32) * fjet0())
            solve = ("x", Z)
        return ReductionCase(name, ansatz, chain, solve[0], solve[1], gen, ())
    if name == "aniso_sp":
        if ab is None:
            raise ReductionError("aniso_sp needs the exponent pair (a, b)")
        a, b = ab
        z_x = Num(b) * X ** Fraction(b - 1) * Y ** Fraction(a)
        z_y = Num(a) * X ** Fraction(b) * Y ** Fraction(a - 1)
        ansatz = (X * Y) ** f32 * PHI
        chain = {"z": {"x": z_x, "y": z_y}}
        gen = VectorField(
            Num(-a) * X, Num(b) * Y, Num(Fraction(3 * (b - a), 2)) * fjet0()
        )
        solve_expr = Z ** Fraction(1, b) * Y ** Fraction(-a, b)
        return ReductionCase(name, ansatz, chain, "x", solve_expr, gen, ())
    if name == "aniso_mu":
        if mu is None:
            raise ReductionError("aniso_mu needs a rational mu")
        mu = Fraction(mu)
        if not mirror:
            ansatz = Y ** (f32 * (1 + mu)) * PHI
            chain = {
                "z": {
                    "x": Y ** (-mu),
                    "y": Num(-mu) * X * Y ** (-mu - 1),
                }
            }
            gen = VectorField(Num(mu) * X, Y, Num(f32 * (1 + mu)) * fjet0())
            solve = ("x", Z * Y ** mu)
        else:
            ansatz = X ** (f32 * (1 + mu)) * PHI
            chain = {
                "z": {
                    "x": Num(-mu) * Y * X ** (-mu - 1),
                    "y": X ** (-mu),
                }
            }
            gen = VectorField(X, Num(mu) * Y, Num(f32 * (1 + mu)) * fjet0())
            solve = ("y", Z * X ** mu)
        return ReductionCase(name, ansatz, chain, solve[0], solve[1], gen, ())
    if name == "ratio_cubic":
        # mu = 1: z = x/y with a cubic-growth ansatz
        if not mirror:
            ansatz = Y ** Fraction(3) * PHI
            chain = {"z": {"x": Y ** Fraction(-1), "y": Num(-1) * X * Y ** Fraction(-2)}}
            solve = ("x", Z * Y)
        else:
            ansatz = X ** Fraction(3) * PHI
            chain = {"z": {"x": Num(-1) * Y * X ** Fraction(-2), "y": X ** Fraction(-1)}}
            solve = ("y", Z * X)
        gen = VectorField(X, Y, Num(3) * fjet0())
        return ReductionCase(name, ansatz, chain, solve[0], solve[1], gen, ())
    if name == "log_source":
        r1, r2, s1, s2 = (Var(n) for n in ("r1", "r2", "s1", "s2"))
        ansatz = (
            PHI
            + (r1 * X * Y + r2) * Log(X)
            + (s1 * X * Y + s2) * Log(Y)
        )
        chain = {"z": {"x": Y, "y": X}}
        gen = VectorField(
            X,
            Num(-1) * Y,
            (r1 - s1) * X * Y + (r2 - s2),
        )
        return ReductionCase(name, ansatz, chain, "x", Z / Y, gen, ("r1", "r2", "s1", "s2"))
    if name == "sextic":
        aa = Var("a")
        if not mirror:
            ansatz = Y ** Fraction(6) * PHI - aa / 4 * Y ** Fraction(2)
            chain = {"z": {"x": Y ** Fraction(-3), "y": Num(-3) * X * Y ** Fraction(-4)}}
            gen = VectorField(Num(3) * X, Y, Num(6) * fjet0() + aa * Y ** Fraction(2))
            solve = ("x", Z * Y ** Fraction(3))
        else:
            ansatz = X ** Fraction(6) * PHI - aa / 4 * X ** Fraction(2)
            chain = {"z": {"x": Num(-3) * Y * X ** Fraction(-4), "y": X ** Fraction(-3)}}
            gen = VectorField(X, Num(3) * Y, Num(6) * fjet0() + aa * X ** Fraction(2))
            solve = ("y", Z * X ** Fraction(3))
        return ReductionCase(name, ansatz, chain, solve[0], solve[1], gen, ("a",))
    if name == "sextic_quad":
        aa = Var("a")
        ansatz = X ** Fraction(2) * PHI - aa / 4 * Y ** Fraction(2)
        chain = {"z": {"x": Y ** Fraction(-3), "y": Num(-3) * X * Y ** Fraction(-4)}}
        return ReductionCase(name, ansatz, chain, "x", Z * Y ** Fraction(3), None, ("a",))
    if name == "line_log":
        aa = Var("a")
        if not mirror:
            ansatz = X * PHI - aa / 3 * X * Log(X)
            chain = {"z": {"x": Y ** Fraction(3), "y": Num(3) * X * Y ** Fraction(2)}}
            gen = VectorField(Num(-3) * X, Y, Num(-3) * fjet0() + aa * X)
            solve = ("x", Z * Y ** Fraction(-3))
        else:
            ansatz = Y * PHI - aa / 3 * Y * Log(Y)
            chain = {"z": {"x": Num(3) * Y * X ** Fraction(2), "y": X ** Fraction(3)}}
            gen = VectorField(X, Num(-3) * Y, Num(-3) * fjet0() + aa * Y)
            solve = ("y", Z * X ** Fraction(-3))
        return ReductionCase(name, ansatz, chain, solve[0], solve[1], gen, ("a",))
    if name == "semi_log":
        aa, bb = Var("a"), Var("b")
        if not mirror:
            ansatz = Y ** f32 * PHI
            chain = {"z": {"x": bb, "y": Num(-1) * aa / Y}}
            gen = VectorField(aa, bb * Y, Num(f32) * bb * fjet0())
            solve = None
        else:
            ansatz = X ** f32 * PHI
            chain = {"z": {"x": Num(-1) * aa / X, "y": bb}}
            gen = VectorField(bb * X, aa, Num(f32) * bb * fjet0())
            solve = None
        return ReductionCase(name, ansatz, chain, None, None, gen, ("a", "b"))
    if name == "line":
        aa, bb = Var("a"), Var("b")
        c0, c1, c2, c3 = (Var(n) for n in ("c0", "c1", "c2", "c3"))
        ansatz = (
            PHI
            + c3 * X ** Fraction(3)
            + c2 * X ** Fraction(2) * Y
            + c1 * X * Y ** Fraction(2)
            + c0 * Y ** Fraction(3)
        )
        chain = {"z": {"x": bb, "y": aa}}
        phi_comp = (
            (Num(-2) * aa * c2 + Num(2) * bb * c1) * X * Y
            + (Num(-3) * aa * c3 + bb * c2) * X ** Fraction(2)
            + (Num(-1) * aa * c1 + Num(3) * bb * c0) * Y ** Fraction(2)
        )
        gen = VectorField(Num(-1) * aa, bb, phi_comp)
        return ReductionCase(
            name, ansatz, chain, "x", (Z - aa * Y) / bb, gen, ("a", "b", "c0", "c1", "c2", "c3")
        )
    raise ReductionError(f"unknown reduction {name!r}")


def fjet0() -> Jet:
    return Jet("f", ("x", "y"), ())


def reduced_residual(case: ReductionCase) -> NF:
    """Substitute the ansatz into the PDE and eliminate (x, y): the result
    must be expressible in z, the phi-jets and the parameters alone."""
    f = case.ansatz
    ch = case.chain
    fx = reify(diff(f, "x", ch))
    fy = reify(diff(f, "y", ch))
    fxx = reify(diff(fx, "x", ch))
    fxy = reify(diff(fx, "y", ch))
    fyy = reify(diff(fy, "y", ch))
    fxxx = reify(diff(fxx, "x", ch))
    fxxy = reify(diff(fxx, "y", ch))
    fxyy = reify(diff(fxy, "y", ch))
    fyyy = reify(diff(fyy, "y", ch))
    resid = fxxx * fyyy - fxxy * fxyy - Num(1)
    if case.solve_var is not None:
        resid = subs_vars(resid, {case.solve_var: case.solve_expr})
    nf = normalize(resid)
    leftover = {
        b.name for b in nf.bases() if isinstance(b, VarBase) and b.name in ("x", "y")
    }
    if leftover:
        raise ReductionError(
            f"{case.name}: reduction left the variables {sorted(leftover)} uncancelled"
        )
    return nf


def match_ode(computed: NF, target: Expr, allowed: tuple[str, ...] = ("z",)) -> Optional[Expr]:
    """Monomial multiplier m with computed = m * target, or None.

    The multiplier may involve z, the listed parameters and numeric surds,
    but never jets or atoms.  The candidate comes from the ratio of leading
    terms and is then verified exactly by cross-multiplication.
    """
    from .kernel.normal import POLY_ONE, Poly, _RootInverse, _reduce_raw, mono_mul

    t_nf = normalize(target)
    if computed.is_zero() or t_nf.is_zero():
        return None
    lhs = computed.num.mul(t_nf.den)
    rhs = t_nf.num.mul(computed.den)
    lm, lc = lhs.leading()
    rm, rc = rhs.leading()
    try:
        extra, mm, mc = _reduce_raw(mono_mul(lm, tuple((b, -e) for b, e in rm)), lc / rc)
    except _RootInverse:
        return None
    if extra is not None or mc.is_zero():
        return None
    for base, _e in mm:
        if isinstance(base, PrimeBase):
            continue
        if isinstance(base, VarBase) and base.name in allowed:
            continue
        return None
    if lhs == rhs.mul(Poly({mm: mc})):
        return NF(Poly({mm: mc}), POLY_ONE).to_expr()
    return None


def verify_invariant_surface(case: ReductionCase) -> bool:
    """xi f_x + eta f_y - phi vanishes identically on the ansatz."""
    if case.generator is None:
        raise ReductionError(f"{case.name}: no generator attached")
    g = case.generator
    f = case.ansatz
    ch = case.chain
    fx = diff(f, "x", ch)
    fy = diff(f, "y", ch)
    phi_comp = substitute(g.phi, {fjet0(): f})
    resid = g.xi * fx + g.eta * fy - phi_comp
    if case.solve_var is not None:
        resid = subs_vars(resid, {case.solve_var: case.solve_expr})
    return is_identically_zero(resid)


# ---------------------------------------------------------------------------
# first integrals and ODE solutions
# ---------------------------------------------------------------------------


def solve_for_phi3(target: Expr) -> Optional[Expr]:
    """phi''' as a rational expression when the ODE is linear in it."""
    lead = reify(partial(target, PHI3))
    if PHI3 in jets_of(lead) or is_identically_zero(lead):
        return None
    rest = target - lead * PHI3
    return reify(rest * Num(-1) / lead)


def verify_first_integral(K: Expr, target: Expr) -> str:
    """'true' / 'false' / 'inconclusive' for d/dz K = 0 modulo the ODE."""
    dK = diff(K, "z")
    sol = solve_for_phi3(target)
    if sol is not None:
        out = normalize(substitute(dK, {PHI3: sol}))
        return "true" if out.is_zero() else "false"
    dk_nf = normalize(dK)
    t_nf = normalize(target)
    if dk_nf.is_zero():
        return "true"
    if t_nf.den.is_const() and dk_nf.den.is_const():
        from .kernel.normal import _try_divide

        q = _try_divide(dk_nf.num, t_nf.num)
        if q is not None:
            return "true"
    return "inconclusive"


def verify_ode_solution(
    phi_expr: Expr,
    target: Expr,
    constraint: Optional[tuple[str, Expr]] = None,
    max_order: int = 4,
) -> bool:
    """Substitute an explicit phi(z) (algebraic roots allowed) into the ODE
    and reduce modulo an optional single parameter constraint."""
    binds: dict[Expr, Expr] = {}
    cur = phi_expr
    for k in range(max_order + 1):
        binds[phijet(*("z",) * k)] = cur
        cur = reify(diff(cur, "z"))
    e = substitute(target, binds)
    if constraint is not None:
        e = subs_vars(e, {constraint[0]: constraint[1]})
    return is_identically_zero(e)


def linearization_factor(target: Expr) -> NF:
    """d/dz of a reduced ODE (the mu = 1 case factorizes through phi'''')."""
    return normalize(diff(target, "z"))


def verify_linearization(target: Expr, factor: Expr) -> bool:
    return linearization_factor(target).equals(normalize(factor))


# ---------------------------------------------------------------------------
# cross-family identities
# ---------------------------------------------------------------------------


def bind_phi_family(expr: Expr, derivs: list[Expr], zvalue: Optional[Expr] = None) -> Expr:
    """Replace phi-jets by the supplied derivative expressions (index =
    order) and optionally the variable z itself."""
    binds: dict[Expr, Expr] = {}
    for k, d in enumerate(derivs):
        binds[phijet(*("z",) * k)] = d
    out = substitute(expr, binds)
    if zvalue is not None:
        out = subs_vars(out, {"z": zvalue})
    return out


def derivative_tower(base: Expr, var: str, chain, n: int) -> list[Expr]:
    out = [base]
    for _ in range(n):
        out.append(reify(diff(out[-1], var, chain)))
    return out

"""High-precision numeric cross-checks: residual sampling at deterministic
rational points and fixed-step RK4 integration with first-integral drift
monitoring."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import mpmath as mp

from .kernel import (
    Expr,
    Jet,
    KernelError,
    Num,
    Var,
    diff,
    eval_numeric,
    substitute,
    subs_vars,
)
from .kernel.nodes import Log, Pow, Prod, Root, Sum
from .fixtures_io import SolutionRow
from .reductions import solve_for_phi3

DEFAULT_PARAMS: dict[str, Fraction] = {
    "k": Fraction(3, 2),
    "c": Fraction(2, 3),
    "alpha": Fraction(1, 3),
    "beta": Fraction(1, 5),
    "gamma": Fraction(1, 7),
    "delta": Fraction(1, 2),
    "r1": Fraction(1, 3),
    "r2": Fraction(1, 5),
    "s1": Fraction(1, 7),
    "s2": Fraction(1, 11),
    "a": Fraction(2, 3),
    "b": Fraction(3, 2),
    "k0": Fraction(1, 4),
    "c0": Fraction(1, 3),
    "c1": Fraction(1, 5),
    "c2": Fraction(1, 7),
    "c3": Fraction(1, 2),
    "T": Fraction(5, 4),
    "w": Fraction(5, 4),
}


@dataclass(frozen=True)
class SampleConfig:
    seed: int = 20240801
    count: int = 20
    digits: int = 50
    box: tuple[Fraction, Fraction] = (Fraction(1, 2), Fraction(2))
    params: dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.digits < 30:
            raise ValueError("digits must be >= 30")

    def param_value(self, name: str) -> Fraction:
        if name in self.params:
            return self.params[name]
        if name in DEFAULT_PARAMS:
            return DEFAULT_PARAMS[name]
        raise KernelError(f"no sample value for parameter {name!r}")


_DENOM = 4096


def sample_points(
    names: Sequence[str], cfg: SampleConfig, stream: str = ""
) -> list[dict[str, Fraction]]:
    """Deterministic rational sample points in the box, one dict per draw."""
    rnd = random.Random(f"{cfg.seed}/{stream}")
    lo, hi = cfg.box
    lo_n = int(lo * _DENOM)
    hi_n = int(hi * _DENOM)
    out = []
    for _ in range(cfg.count):
        out.append({n: Fraction(rnd.randint(lo_n, hi_n), _DENOM) for n in names})
    return out


def max_abs_sample(
    exprs: Sequence[Expr],
    var_names: Sequence[str],
    cfg: SampleConfig,
    stream: str = "",
    extra: Optional[dict[str, Fraction]] = None,
) -> mp.mpf:
    """Maximum modulus of the expressions over the sampled points."""
    points = sample_points(var_names, cfg, stream)
    worst = mp.mpf(0)
    bind_extra = dict(extra or {})
    for pt in points:
        full = dict(bind_extra)
        full.update(pt)
        for e in exprs:
            v = eval_numeric(e, full, cfg.digits)
            with mp.workdps(cfg.digits + 10):
                m = mp.fabs(v)
                if m > worst:
                    worst = m
    return worst


def residual_tolerance(cfg: SampleConfig) -> mp.mpf:
    return mp.mpf(10) ** (-30) if cfg.digits >= 50 else mp.mpf(10) ** (5 - cfg.digits)


# ---------------------------------------------------------------------------
# raw (non-normalized) residual trees for solution rows: the evaluation path
# shares nothing with the normalizer beyond the expression type itself.
# ---------------------------------------------------------------------------


def _raw_tower(base: Expr, u: str, v: str, p_map: Expr, q_map: Expr, order: int = 3):
    p_u, p_v = diff(p_map, u), diff(p_map, v)
    q_u, q_v = diff(q_map, u), diff(q_map, v)
    det = p_u * q_v - p_v * q_u

    def d_p(g: Expr) -> Expr:
        return (q_v * diff(g, u) - q_u * diff(g, v)) / det

    def d_q(g: Expr) -> Expr:
        return (p_u * diff(g, v) - p_v * diff(g, u)) / det

    out = {(0, 0): base}
    for n in range(1, order + 1):
        for np_ in range(n + 1):
            nq = n - np_
            out[(np_, nq)] = d_p(out[(np_ - 1, nq)]) if np_ else d_q(out[(np_, nq - 1)])
    return out


def _raw_direct(base: Expr, vars2: tuple[str, str], maps: dict[str, Expr], order: int = 3):
    out = {(0, 0): base}
    a, b = vars2
    for n in range(1, order + 1):
        for na in range(n + 1):
            nb = n - na
            out[(na, nb)] = diff(out[(na - 1, nb)], a) if na else diff(out[(na, nb - 1)], b)
    sub = {k: v for k, v in maps.items() if not (isinstance(v, Var) and v.name == k)}
    if sub:
        out = {k: subs_vars(v, sub) for k, v in out.items()}
    return out


def row_residual_exprs(row: SolutionRow) -> list[tuple[str, Expr]]:
    """Raw residual trees for a table row, in its chart coordinates."""
    from .pde import _relation_set

    maps = {"x": row.map_x, "y": row.map_y, "t": row.map_t}

    def constrained(e: Expr) -> Expr:
        if row.constraint is not None:
            return subs_vars(e, {row.constraint[0]: row.constraint[1]})
        return e

    f = constrained(row.f)
    if row.f_mode == "direct":
        fj = _raw_direct(f, ("x", "y"), maps)
    else:
        f_uv = subs_vars(f, {"x": row.map_x, "y": row.map_y})
        fj = _raw_tower(f_uv, row.coords[0], row.coords[1], row.map_x, row.map_y)
    out = [("eq2", fj[(3, 0)] * fj[(0, 3)] - fj[(2, 1)] * fj[(1, 2)] - Num(1))]
    if row.F is None:
        return [(n, constrained(e)) for n, e in out]
    Fe = constrained(row.F)
    if row.F_mode == "direct":
        Fp = _raw_direct(Fe, ("y", "t"), maps)
    else:
        Fp = _raw_tower(Fe, row.coords[0], row.coords[1], row.map_y, row.map_t)
    out.append(("eq3", Fp[(2, 1)] * Fp[(2, 1)] - Fp[(0, 3)] - Fp[(1, 2)] * Fp[(3, 0)]))
    ctx = {"fjets": fj, "Fparts": Fp, "x": row.map_x, "t": row.map_t}
    out.extend((f"hodograph/{n}", e) for n, e in _relation_set(ctx))
    return [(n, constrained(e)) for n, e in out]


def _f1_residual_exprs() -> list[tuple[str, Expr]]:
    """Raw residuals for the derived algebraic-root row, taken through its
    explicit first derivatives (two chart levels instead of three)."""
    from .solutions import derive_f1_polynomials
    from .kernel import reify

    d = derive_f1_polynomials()
    x, y = Var("x"), Var("y")
    fj = {}
    fj[(1, 0)] = diff(d.f, "x")
    fj[(0, 1)] = diff(d.f, "y")
    fj[(1, 1)] = diff(fj[(1, 0)], "y")
    fj[(0, 2)] = diff(fj[(0, 1)], "y")
    fj[(2, 0)] = diff(fj[(1, 0)], "x")
    fj[(3, 0)] = diff(fj[(2, 0)], "x")
    fj[(2, 1)] = diff(fj[(2, 0)], "y")
    fj[(1, 2)] = diff(fj[(1, 1)], "y")
    fj[(0, 3)] = diff(fj[(0, 2)], "y")
    t_map = d.t_map
    F_t = reify(y * x + Num(Fraction(3, 2)) * t_map * reify(fj[(0, 2)]))
    F_y = reify(t_map * x - Num(Fraction(2, 3)) * y * reify(fj[(1, 1)]))
    t_x, t_y = diff(t_map, "x"), diff(t_map, "y")

    def d_yc(g: Expr) -> Expr:  # d/dy at constant t
        return diff(g, "y") - diff(g, "x") * t_y / t_x

    def d_tc(g: Expr) -> Expr:  # d/dt at constant y
        return diff(g, "x") / t_x

    out = [
        ("eq2", fj[(3, 0)] * fj[(0, 3)] - fj[(2, 1)] * fj[(1, 2)] - Num(1)),
        ("gradient/t", d_tc(d.F) - F_t),
        ("gradient/y", d_yc(d.F) - F_y),
        ("hodograph/fxy=-Fyy", fj[(1, 1)] + d_yc(F_y)),
        ("hodograph/fyy=Ftt", fj[(0, 2)] - d_tc(F_t)),
        ("hodograph/x=Fty", x - d_yc(F_t)),
        ("mixed", d_yc(F_t) - d_tc(F_y)),
    ]
    Ftt, Fty = d_tc(F_t), d_yc(F_t)
    Fyy = d_yc(F_y)
    Fttt, Ftty = d_tc(Ftt), d_yc(Ftt)
    Ftyy, Fyyy = d_yc(Fty), d_yc(Fyy)
    out.append(("eq3", Ftyy * Ftyy - Fttt - Ftty * Fyyy))
    inv = Num(1) / fj[(3, 0)]
    out += [
        ("hodograph/Fyyy", Fyyy - (fj[(2, 1)] * fj[(2, 1)] * inv - fj[(1, 2)])),
        ("hodograph/Ftyy", Ftyy + fj[(2, 1)] * inv),
        ("hodograph/Ftty", Ftty - inv),
        ("hodograph/Fttt", Fttt - fj[(1, 2)] * inv),
    ]
    return out


def sample_row(row: SolutionRow, cfg: SampleConfig) -> mp.mpf:
    """Max sampled modulus over all residuals of a row."""
    if row.label == "F1":
        exprs = [e for _n, e in _f1_residual_exprs()]
    else:
        exprs = [e for _n, e in row_residual_exprs(row)]
    extra = {p: cfg.param_value(p) for p in row.parameters}
    return max_abs_sample(exprs, row.coords, cfg, stream=f"row:{row.label}", extra=extra)


def check_agreement(
    e: Expr,
    proved_zero: bool,
    var_names: Sequence[str],
    cfg: SampleConfig,
    extra: Optional[dict[str, Fraction]] = None,
    stream: str = "agreement",
) -> bool:
    """Symbolic-numeric consistency guard: a proved zero must sample below
    10^(5-digits); a proved nonzero must exceed the tolerance for at least
    one of up to five reseeded draws."""
    tol = mp.mpf(10) ** (5 - cfg.digits)
    if proved_zero:
        return max_abs_sample([e], var_names, cfg, stream, extra) < tol
    for k in range(5):
        trial = SampleConfig(
            seed=cfg.seed + k, count=cfg.count, digits=cfg.digits, box=cfg.box, params=cfg.params
        )
        if max_abs_sample([e], var_names, trial, stream, extra) > residual_tolerance(cfg):
            return True
    return False


# ---------------------------------------------------------------------------
# float compilation and RK4 with first-integral drift
# ---------------------------------------------------------------------------


def compile_float(e: Expr, names: Sequence[str]) -> Callable[..., complex]:
    """Compile a tree into nested closures over complex floats."""
    index = {n: i for i, n in enumerate(names)}
    if isinstance(e, Num):
        val = complex(float(e.value.re), float(e.value.im))
        return lambda *a: val
    if isinstance(e, Var):
        i = index[e.name]
        return lambda *a: a[i]
    if isinstance(e, Jet):
        i = index[e.shorthand()]
        return lambda *a: a[i]
    if isinstance(e, Log):
        import cmath

        f = compile_float(e.arg, names)
        return lambda *a: cmath.log(f(*a))
    if isinstance(e, Root):
        import cmath

        f = compile_float(e.square, names)
        return lambda *a: cmath.sqrt(f(*a))
    if isinstance(e, Sum):
        fs = [compile_float(t, names) for t in e.terms]
        return lambda *a: sum(f(*a) for f in fs)
    if isinstance(e, Prod):
        fs = [compile_float(t, names) for t in e.factors]

        def prod(*a):
            out = complex(1)
            for f in fs:
                out *= f(*a)
            return out

        return prod
    if isinstance(e, Pow):
        f = compile_float(e.base, names)
        q = float(e.exp)
        if e.exp.denominator == 1:
            n = int(e.exp)
            return lambda *a: f(*a) ** n
        return lambda *a: f(*a) ** q
    raise KernelError(f"cannot compile {type(e).__name__}")


@dataclass
class DriftReport:
    drifts: dict[str, float]
    steps: int
    span: tuple[Fraction, Fraction]

    @property
    def max_drift(self) -> float:
        return max(self.drifts.values()) if self.drifts else 0.0


def integrate_ode_check(
    target: Expr,
    init: tuple[float, float, float, float],
    integrals: dict[str, Expr],
    z_end: float,
    steps: int,
    params: Optional[dict[str, Fraction]] = None,
) -> DriftReport:
    """Classical fixed-step RK4 on the third-order ODE written as a first
    order system; returns the maximal drift of each first integral along
    the trajectory."""
    binds = {Var(k): Num(v) for k, v in (params or {}).items()}
    tgt = substitute(target, binds) if binds else target
    sol = solve_for_phi3(tgt)
    if sol is None:
        raise KernelError("ODE is not solvable for the third derivative")
    names = ("z", "phi", "phi_z", "phi_zz")
    g = compile_float(sol, names)
    ks = {
        n: compile_float(substitute(e, binds) if binds else e, names)
        for n, e in integrals.items()
    }
    z0, p0, p1, p2 = (complex(v) for v in init)
    h = (complex(z_end) - z0) / steps
    state = (p0, p1, p2)
    z = z0
    base = {n: f(z, *state) for n, f in ks.items()}
    drift = {n: 0.0 for n in ks}

    def rhs(zv, s):
        return (s[1], s[2], g(zv, *s))

    for _ in range(steps):
        k1 = rhs(z, state)
        s2 = tuple(s + h / 2 * k for s, k in zip(state, k1))
        k2 = rhs(z + h / 2, s2)
        s3 = tuple(s + h / 2 * k for s, k in zip(state, k2))
        k3 = rhs(z + h / 2, s3)
        s4 = tuple(s + h * k for s, k in zip(state, k3))
        k4 = rhs(z + h, s4)
        state = tuple(
            s + h / 6 * (a + 2 * b + 2 * c + d)
            for s, a, b, c, d in zip(state, k1, k2, k3, k4)
        )
        z = z + h
        for n, f in ks.items():
            d = abs(f(z, *state) - base[n])
            if d > drift[n]:
                drift[n] = d
    return DriftReport(drift, steps, (Fraction(init[0]).limit_denominator(), Fraction(z_end).limit_denominator()))


def convergence_ratio(
    target: Expr,
    init: tuple[float, float, float, float],
    integral_name: str,
    integrals: dict[str, Expr],
    z_end: float,
    coarse_steps: int,
    params: Optional[dict[str, Fraction]] = None,
) -> float:
    """Drift ratio between a coarse run and its step-halved refinement; a
    fourth-order scheme gives roughly 2^4."""
    d1 = integrate_ode_check(target, init, integrals, z_end, coarse_steps, params)
    d2 = integrate_ode_check(target, init, integrals, z_end, 2 * coarse_steps, params)
    a = d1.drifts[integral_name]
    b = d2.drifts[integral_name]
    if b == 0:
        return float("inf")
    return a / b

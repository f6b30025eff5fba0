"""Reduction machinery: residual matching, first integrals, explicit
solutions and the cross-family identities."""
from fractions import Fraction as F

import pytest

from wdvvsym.fixtures_io import (
    PACKAGED_FIXTURES,
    load_first_integrals,
    load_ode_solutions,
    load_reduction_targets,
)
from wdvvsym.kernel import (
    Num,
    Var,
    diff,
    nf_equal,
    normalize,
    parse,
    reify,
    substitute,
    subs_vars,
)
from wdvvsym.reductions import (
    ReductionError,
    bind_phi_family,
    make_case,
    match_ode,
    phijet,
    reduced_residual,
    solve_for_phi3,
    verify_first_integral,
    verify_invariant_surface,
    verify_linearization,
    verify_ode_solution,
)

PHI = {"phi": ("z",)}
TARGETS = load_reduction_targets(PACKAGED_FIXTURES)


def _inst(name, **vals):
    return substitute(TARGETS[name].target, {Var(k): Num(F(v)) for k, v in vals.items()})


def test_half_power_matches():
    nf = reduced_residual(make_case("half_power"))
    m = match_ode(nf, TARGETS["half_power"].target)
    assert m is not None and nf_equal(m, Num(F(-3, 16)))


def test_mu_family_matches_at_samples():
    for mu in (F(2), F(-1, 2), F(7, 4)):
        nf = reduced_residual(make_case("aniso_mu", mu=mu))
        m = match_ode(nf, _inst("aniso_mu", mu=mu))
        assert m is not None and nf_equal(m, Num(F(1, 8))), mu


def test_mu_family_printed_variant_fails():
    nf = reduced_residual(make_case("aniso_mu", mu=F(7, 4)))
    assert match_ode(nf, _inst("aniso_mu_printed", mu=F(7, 4))) is None


def test_sp_family_matches():
    nf = reduced_residual(make_case("aniso_sp", ab=(2, 3)))
    assert match_ode(nf, _inst("aniso_sp", s=5, p=6)) is not None
    assert match_ode(nf, _inst("aniso_sp_printed", s=5, p=6)) is None


def test_ratio_cubic_matches():
    nf = reduced_residual(make_case("ratio_cubic"))
    m = match_ode(nf, TARGETS["ratio_cubic"].target)
    assert m is not None and nf_equal(m, Num(1))


def test_match_ode_trivial_and_constructed():
    t = TARGETS["ratio_cubic"].target
    nf = normalize(t)
    assert nf_equal(match_ode(nf, t), Num(1))
    scaled = normalize(Num(-1) * Var("z") ** F(2) * t)
    assert nf_equal(match_ode(scaled, t), Num(-1) * Var("z") ** F(2))
    assert match_ode(nf, parse("phi_zz + 1", functions=PHI)) is None


def test_log_family_matches_derivative_of_relation():
    d20 = diff(TARGETS["log_relation"].target, "z")
    nf = reduced_residual(make_case("log_source"))
    m = match_ode(nf, d20, allowed=("z", "r1", "r2", "s1", "s2"))
    assert m is not None and nf_equal(m, Num(-2))


def test_remaining_reductions_match():
    for name, allowed in (
        ("sextic", ("z", "a")),
        ("sextic_quad", ("z", "a")),
        ("line_log", ("z", "a")),
        ("semi_log", ("z", "a", "b")),
        ("line", ("z", "a", "b", "c0", "c1", "c2", "c3")),
    ):
        nf = reduced_residual(make_case(name))
        assert match_ode(nf, TARGETS[name].target, allowed=allowed) is not None, name


def test_mirror_ansatz_same_residual():
    for name, kw in (("half_power", {}), ("aniso_mu", {"mu": F(2)}), ("semi_log", {})):
        a = reduced_residual(make_case(name, **kw))
        b = reduced_residual(make_case(name, mirror=True, **kw))
        assert a.equals(b), name


def test_gauge_parameter_drops_out():
    for name in ("sextic", "sextic_quad"):
        nf = reduced_residual(make_case(name))
        assert all(getattr(b, "name", None) != "a" for b in nf.bases()), name


def test_sextic_equals_mu_three():
    nf = reduced_residual(make_case("sextic"))
    m = match_ode(nf, _inst("aniso_mu", mu=3))
    assert m is not None and nf_equal(m, Num(F(1, 8)))


def test_mu_minus_one_equals_parameter_free_log_family():
    d20 = diff(TARGETS["log_relation"].target, "z")
    d20_0 = substitute(d20, {Var(v): Num(0) for v in ("r1", "r2", "s1", "s2")})
    nf = reduced_residual(make_case("aniso_mu", mu=F(-1)))
    assert match_ode(nf, d20_0) is not None


def test_mu_reciprocal_symmetry():
    mu = F(5, 3)
    q = F(3, 2) * (1 + mu)
    W = Var("w")
    chain = {"z": {"w": diff(W ** (-mu), "w")}}
    psi = [W ** q * phijet()]
    for _ in range(3):
        psi.append(reify(diff(psi[-1], "w", chain)))
    t_inv = subs_vars(_inst("aniso_mu", mu=1 / mu), {"z": W})
    t_sub = bind_phi_family(t_inv, psi)
    ref = subs_vars(_inst("aniso_mu", mu=mu), {"z": W ** (-mu)})
    m = match_ode(normalize(t_sub), ref, allowed=("w",))
    assert m is not None and nf_equal(m, Num(1))


def test_line_log_gauge_free_is_mu_minus_three():
    t14 = _inst("aniso_mu", mu=-3)
    psi = [Var("z") * phijet()]
    for _ in range(3):
        psi.append(reify(diff(psi[-1], "z")))
    t_sub = bind_phi_family(t14, psi)
    nf24 = reduced_residual(make_case("line_log"))
    nf24a0 = normalize(substitute(nf24.to_expr(), {Var("a"): Num(0)}))
    assert match_ode(nf24a0, t_sub) is not None


def test_invariant_surfaces():
    for name, kw in (
        ("half_power", {}),
        ("aniso_mu", {"mu": F(2)}),
        ("log_source", {}),
        ("line", {}),
    ):
        assert verify_invariant_surface(make_case(name, **kw)), name


def test_invariant_surface_mismatch():
    import dataclasses

    from wdvvsym.lie import VectorField

    case = make_case("ratio_cubic")
    wrong = dataclasses.replace(case, generator=VectorField(Var("x"), Num(0), Num(0)))
    assert not verify_invariant_surface(wrong)


def test_incomplete_cancellation_raises():
    import dataclasses

    case = make_case("aniso_mu", mu=F(2))
    broken = dataclasses.replace(case, solve_expr=Var("z") * Var("y"))
    with pytest.raises(ReductionError):
        reduced_residual(broken)


def test_first_integrals():
    for fi in load_first_integrals(PACKAGED_FIXTURES):
        tgt = TARGETS[fi.reduction].target
        if fi.mu is not None:
            tgt = substitute(tgt, {Var("mu"): Num(fi.mu)})
        assert verify_first_integral(fi.integral, tgt) == "true", fi.name


def test_first_integral_false_control():
    tgt = _inst("aniso_mu", mu=0)
    assert verify_first_integral(phijet(), tgt) == "false"


def test_mu1_triple_equals_derivative_forms():
    t16 = TARGETS["ratio_cubic"].target
    sol = solve_for_phi3(t16)
    by_name = {fi.name: fi.integral for fi in load_first_integrals(PACKAGED_FIXTURES)}
    alt = substitute(parse("2*phi_zzz/12", functions=PHI), {phijet("z", "z", "z"): sol})
    assert normalize(alt - by_name["ratio_cubic_a"]).is_zero()


def test_linearization():
    t16 = TARGETS["ratio_cubic"].target
    factor = parse("2*(3*phi - 2*z*phi_z)*phi_zzzz", functions=PHI)
    assert verify_linearization(t16, factor)
    assert verify_linearization(t16 + Num(-1), factor)


def test_ode_solutions():
    for s in load_ode_solutions(PACKAGED_FIXTURES):
        tgt = TARGETS[s.reduction].target
        if s.mu is not None:
            tgt = substitute(tgt, {Var("mu"): Num(s.mu)})
        assert verify_ode_solution(s.phi, tgt, s.constraint), s.name


def test_universal_solution_symbolic_mu():
    phi = parse("2*I*sqrt(2)/3*z^(3/2)", functions=PHI)
    assert verify_ode_solution(phi, TARGETS["aniso_mu"].target)


def test_quadrature_scaling_fixes_constant():
    rel = substitute(
        TARGETS["log_relation"].target, {Var(v): Num(0) for v in ("r1", "r2", "s1", "s2")}
    )
    phi = parse("2*I*sqrt(2)/3*z^(3/2)", functions=PHI)
    binds = {}
    cur = phi
    for k in range(3):
        binds[phijet(*("z",) * k)] = cur
        cur = reify(diff(cur, "z"))
    resid = normalize(substitute(rel, binds))
    assert resid.equals(normalize(Var("k0")))


def test_quadrature_particular_solution():
    from wdvvsym.pde import ferapontov_residual

    fps = parse("2*I*sqrt(2)/3*(x*y)^(3/2) + c*x*y*log(x/y)")
    assert normalize(ferapontov_residual(fps)).is_zero()

"""Numeric layer: deterministic sampling, agreement guards and RK4 drift."""
from fractions import Fraction as F

import mpmath as mp
import pytest

from wdvvsym.fixtures_io import PACKAGED_FIXTURES, load_reduction_targets, load_solution_rows
from wdvvsym.kernel import Num, Var, parse, substitute
from wdvvsym.pde import ferapontov_residual
from wdvvsym.sampling import (
    SampleConfig,
    check_agreement,
    convergence_ratio,
    integrate_ode_check,
    max_abs_sample,
    residual_tolerance,
    sample_points,
    sample_row,
)

ROWS = {r.label: r for r in load_solution_rows(PACKAGED_FIXTURES)}
TARGETS = load_reduction_targets(PACKAGED_FIXTURES)
PHI = {"phi": ("z",)}


def test_sample_points_deterministic_and_in_box():
    cfg = SampleConfig(count=10)
    a = sample_points(["x", "y"], cfg, "s")
    b = sample_points(["x", "y"], cfg, "s")
    assert a == b
    for pt in a:
        for v in pt.values():
            assert F(1, 2) <= v <= F(2)
    c = sample_points(["x", "y"], SampleConfig(seed=1234, count=10), "s")
    assert c != a


def test_config_validation():
    with pytest.raises(ValueError):
        SampleConfig(count=0)
    with pytest.raises(ValueError):
        SampleConfig(digits=10)


def test_sample_rows_below_tolerance():
    cfg = SampleConfig(count=5)
    tol = residual_tolerance(cfg)
    for label in ("scaling", "tetra", "Dub2p", "octap"):
        assert sample_row(ROWS[label], cfg) < tol, label


def test_constant_residual_samples_near_one():
    cfg = SampleConfig(count=5)
    w = max_abs_sample([ferapontov_residual(parse("x^3"))], ("x", "y"), cfg)
    with mp.workdps(40):
        assert mp.fabs(w - 1) < mp.mpf("1e-30")


def test_agreement_guard_both_sides():
    cfg = SampleConfig(count=5)
    assert check_agreement(ferapontov_residual(parse("2*I*sqrt(2)/3*(x*y)^(3/2)")), True, ("x", "y"), cfg)
    assert check_agreement(ferapontov_residual(parse("x^3")), False, ("x", "y"), cfg)


def _mu1_setup():
    t16 = TARGETS["ratio_cubic"].target
    tri = {
        "a": parse("(1 + 2*phi_z*phi_zz - 2*z*phi_zz^2)/(12*(3*phi - 2*z*phi_z))", functions=PHI),
    }
    return t16, tri


def test_rk4_mu1_drift():
    t16, tri = _mu1_setup()
    rep = integrate_ode_check(t16, (1.0, 5 / 9, 1.5, 3.0), tri, 2.0, 10_000)
    assert rep.max_drift < 1e-8


def test_rk4_convergence_fourth_order():
    t16, tri = _mu1_setup()
    ratio = convergence_ratio(t16, (1.0, 5 / 9, 1.5, 3.0), "a", tri, 2.0, 100)
    assert 8.0 < ratio < 32.0


def test_rk4_mu_minus_one():
    t = substitute(TARGETS["aniso_mu"].target, {Var("mu"): Num(-1)})
    K = {"K": parse("z + 2*z^2*phi_zz^2", functions=PHI)}
    rep = integrate_ode_check(t, (1.0, 0.0, 0.0, 1.224744871391589049), K, 2.0, 10_000)
    assert rep.max_drift < 1e-8
    ratio = convergence_ratio(t, (1.0, 0.0, 0.0, 1.224744871391589049), "K", K, 2.0, 100)
    assert 8.0 < ratio < 32.0


def test_rk4_rejects_unsolvable():
    from wdvvsym.kernel import KernelError

    quad = parse("phi_zzz^2 - 1", functions=PHI)
    with pytest.raises(KernelError):
        integrate_ode_check(quad, (1.0, 0.0, 0.0, 1.0), {}, 2.0, 10)


def test_reduction_consistency_numeric():
    """The substituted-ansatz residual of the PDE equals the reduced
    residual at matching points: an end-to-end check of the change of
    variables that shares nothing with the matching machinery."""
    from wdvvsym.kernel import diff, eval_numeric, reify, subs_vars
    from wdvvsym.reductions import make_case, phijet, reduced_residual

    mu = F(2)
    case = make_case("aniso_mu", mu=mu)
    # concrete profile for the similarity function
    profile = parse("z^3 + z/2", functions=PHI)
    binds = {}
    cur = profile
    for k in range(4):
        binds[phijet(*("z",) * k)] = cur
        cur = reify(diff(cur, "z"))
    reduced = substitute(reduced_residual(case).to_expr(), binds)
    f_concrete = subs_vars(substitute(case.ansatz, binds), {"z": parse("x*y^(-2)")})
    from wdvvsym.pde import ferapontov_residual

    resid = ferapontov_residual(f_concrete)
    for x0, y0 in ((F(3, 4), F(5, 4)), (F(7, 8), F(9, 8))):
        z0 = x0 / y0**2
        lhs = eval_numeric(resid, {"x": x0, "y": y0}, 40)
        rhs = eval_numeric(reduced, {"z": z0}, 40)
        with mp.workdps(50):
            assert mp.fabs(lhs - rhs) < mp.mpf(10) ** -30


def test_inconclusive_does_not_affect_exit():
    from wdvvsym.report import CheckRecord, INCONCLUSIVE, PASS, Report

    rep = Report(
        suites=["x"],
        records=[
            CheckRecord("x/a", "", PASS),
            CheckRecord("x/b", "", INCONCLUSIVE),
        ],
        fixtures_hash="0",
        seed=1,
        digits=50,
    )
    assert rep.ok
    assert rep.counts()["inconclusive"] == 1


def test_threaded_verification_is_safe():
    """Expressions are immutable and operations re-entrant: identical row
    verifications running in parallel threads agree with the serial one."""
    import threading

    from wdvvsym.solutions import verify_row

    results = {}

    def work(label):
        rep = verify_row(ROWS[label], with_qh=False)
        results[label] = rep.passed

    threads = [threading.Thread(target=work, args=(l,)) for l in ("scaling", "tetra", "F4", "Dub2p")]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == {"scaling": True, "tetra": True, "F4": True, "Dub2p": True}

"""Solutions-table verification: charts, representative rows, mirrors and
the derived algebraic-root row."""
from fractions import Fraction as F

import pytest

from wdvvsym.fixtures_io import PACKAGED_FIXTURES, load_solution_rows
from wdvvsym.kernel import Num, Var, normalize, parse, substitute
from wdvvsym.solutions import (
    ChartError,
    ChartOps,
    derive_f1_polynomials,
    f1_row,
    mirror_check,
    row_quasi_homogeneity,
    verify_f1_report,
    verify_row,
)

ROWS = {r.label: r for r in load_solution_rows(PACKAGED_FIXTURES)}


def test_chart_singular_jacobian_rejected():
    with pytest.raises(ChartError):
        ChartOps("x", "y", Var("y"), Var("y"))


def test_chart_derivatives_match_direct():
    # trivial chart reduces to plain differentiation
    ops = ChartOps("x", "y", Var("x"), Var("y"))
    g = parse("x^2*y + y^3")
    from wdvvsym.kernel import diff, nf_equal

    assert nf_equal(ops.d_p(g), diff(g, "x"))
    assert nf_equal(ops.d_q(g), diff(g, "y"))


@pytest.mark.parametrize("label", ["scaling", "F4", "tetra", "Dub2p", "octa"])
def test_explicit_rows(label):
    rep = verify_row(ROWS[label])
    assert rep.passed, [c.name for c in rep.failing()]


@pytest.mark.parametrize("label", ["tetrap", "Dub1", "Dub2", "N1", "N1p"])
def test_chart_rows(label):
    rep = verify_row(ROWS[label])
    assert rep.passed, [c.name for c in rep.failing()]


def test_parametric_row_octap():
    rep = verify_row(ROWS["octap"])
    assert rep.passed
    names = [c.name for c in rep.checks]
    assert "mixed_partials" in names and "jacobian_nonzero" in names


def test_row_quasi_homogeneity_found():
    q = row_quasi_homogeneity(ROWS["N1"])
    assert q.found
    q2 = row_quasi_homogeneity(ROWS["tetra"])
    assert q2.found


def test_link_is_second_derivative():
    # t = f_xx holds for the tetra row by construction of its report
    rep = verify_row(ROWS["tetra"])
    assert any(c.name == "hodograph/fxx=t" and c.passed for c in rep.checks)


def test_mirrors():
    rows = dict(ROWS)
    rows["F1"] = f1_row()
    for r in rows.values():
        if r.mirror_of:
            assert mirror_check(r, rows[r.mirror_of]), r.label


def test_corrupted_row_detected():
    import dataclasses

    bad = dataclasses.replace(
        ROWS["tetra"], F=parse("y^2*t^2/(4*k) + t^5/(61*k^2)"), printed={}
    )
    rep = verify_row(bad, with_qh=False)
    assert not rep.passed


def test_printed_variants_fail():
    import dataclasses

    for label, fieldname in (("Dub1", "f"), ("Dub2p", "f"), ("F1p", "map_x")):
        row = ROWS[label]
        bad = dataclasses.replace(
            row, **{fieldname: row.printed[fieldname]}, printed={}, quasi_homogeneous=False
        )
        rep = verify_row(bad, with_qh=False)
        assert not rep.passed, label


def test_f1_polynomials():
    d = derive_f1_polynomials()
    want = parse("(3*x^4 + 4*alpha*x^3 + 6*beta*x^2 + 12*gamma*x + 4*alpha*gamma - beta^2)/6")
    assert normalize(d.p4 - want).is_zero()
    zero = {Var("alpha"): Num(0), Var("beta"): Num(0), Var("gamma"): Num(0)}
    assert normalize(substitute(d.p4, zero) - parse("x^4/2")).is_zero()
    assert normalize(substitute(d.p8, zero) - parse("-x^8/8")).is_zero()


def test_f1_certificate():
    rep = verify_f1_report()
    assert rep.passed, [c.name for c in rep.failing()]
    assert len(rep.checks) > 30

"""Prolongation, determining equations, structure constants and adjoints."""
from fractions import Fraction as F

import pytest

from wdvvsym.epsfun import EpsFun, parse_epsfun
from wdvvsym.fixtures_io import (
    load_adjoint_table,
    load_commutator_table,
    load_file,
    load_optimal_system,
)
from wdvvsym.kernel import Num, Var, is_identically_zero
from wdvvsym.lie import (
    LieError,
    VectorField,
    adjoint_action,
    adjoint_matrix_exp,
    commutator,
    fjet,
    jacobi_violations,
    optimal_system_spotcheck,
    prolong3,
    same_span,
    solve_determining,
    structure_constants,
    symmetry_residual,
)


def test_vector_field_rejects_jets():
    with pytest.raises(LieError):
        VectorField(fjet("x"), Num(0), Num(0))


def test_prolongation_translation_trivial(basis):
    pr = prolong3(basis[0])
    assert all(is_identically_zero(e) for e in pr.values())


def test_prolongation_quadratic_gauge(basis):
    pr = prolong3(basis[5])  # x^2 d_f
    assert is_identically_zero(pr[("x", "x")] - Num(2))
    assert is_identically_zero(pr[("x", "y")])
    assert is_identically_zero(pr[("y", "y")])
    for J in (("x", "x", "x"), ("x", "x", "y"), ("x", "y", "y"), ("y", "y", "y")):
        assert is_identically_zero(pr[J])


def test_prolongation_scaling(basis):
    pr = prolong3(basis[2])  # x d_x + 3/2 f d_f
    assert is_identically_zero(pr[("x", "x", "x")] + Num(F(3, 2)) * fjet("x", "x", "x"))


def test_symmetry_residuals(basis):
    for v in basis:
        assert symmetry_residual(v).is_zero()
    assert not symmetry_residual(VectorField(Num(0), Num(0), fjet())).is_zero()
    assert not symmetry_residual(VectorField(Var("x"), Num(0), Num(0))).is_zero()


def test_determining_dimensions(basis):
    assert solve_determining(0).dimension == 3
    assert solve_determining(1).dimension == 7
    res = solve_determining(2)
    assert res.dimension == 10
    assert same_span(res.fields, basis)


def test_determining_stabilizes(basis):
    # dimensions are monotone in the degree and settle at ten
    res = solve_determining(4)
    assert res.dimension == 10
    assert same_span(res.fields, basis)


def test_commutators(basis, algebra):
    c13 = commutator(basis[0], basis[2])
    assert is_identically_zero(c13.xi - Num(1))
    c11 = commutator(basis[0], basis[0])
    assert c11.is_zero()
    c16 = commutator(basis[0], basis[5])
    assert is_identically_zero(c16.phi - Num(2) * Var("x"))
    # exact expansion coefficients
    assert algebra.c[0][2] == [F(1), 0, 0, 0, 0, 0, 0, 0, 0, 0]
    assert algebra.c[0][5] == [0, 0, 0, 0, 0, 0, 0, F(2), 0, 0]


def test_commutator_table_matches_fixtures(algebra, fixdir):
    table = load_commutator_table(fixdir)
    assert len(table) == 100
    for (i, j), want in table.items():
        assert algebra.c[i - 1][j - 1] == want, (i, j)


def test_antisymmetry(algebra):
    for i in range(10):
        for j in range(10):
            assert algebra.c[i][j] == [-x for x in algebra.c[j][i]]


def test_jacobi(algebra):
    assert jacobi_violations(algebra) == []


def test_closure_failure_reported(basis):
    bad = basis[:2] + [VectorField(Num(0), Num(0), Var("x") ** F(3))]
    with pytest.raises(LieError):
        structure_constants([basis[0], bad[2]])


def test_adjoint_table_matches_fixtures(algebra, fixdir):
    table = load_adjoint_table(fixdir)
    assert len(table) == 100
    for i in range(1, 11):
        m = adjoint_matrix_exp(algebra, i - 1)
        for j in range(1, 11):
            col = {k + 1: m[k][j - 1] for k in range(10) if not m[k][j - 1].is_zero()}
            assert col == table[(i, j)], (i, j)


def test_adjoint_specific_entries(algebra):
    col = adjoint_action(algebra, 0, 5)  # flow of the first translation on the x^2 gauge
    assert col[5] == EpsFun.const(1)
    assert col[7] == parse_epsfun("-2*eps")
    assert col[9] == parse_epsfun("eps^2")
    col2 = adjoint_action(algebra, 2, 0)
    assert col2[0] == parse_epsfun("exp(eps)")
    col3 = adjoint_action(algebra, 3, 6)
    assert col3[6] == parse_epsfun("exp(-eps/2)")


def test_adjoint_at_zero_is_identity(algebra):
    m = adjoint_matrix_exp(algebra, 4)
    for i in range(10):
        for j in range(10):
            want = F(1) if i == j else F(0)
            assert m[i][j].at_zero() == want


def test_one_parameter_group_law(algebra):
    m = adjoint_matrix_exp(algebra, 0)
    for i in range(10):
        for j in range(10):
            prod = EpsFun()
            for t in range(10):
                prod = prod.add(m[i][t].mul(m[t][j]))
            assert prod == m[i][j].stretch(2)


def test_optimal_spotchecks(algebra, fixdir):
    fams = load_optimal_system(fixdir)
    assert len(fams) == 11
    claims = [b for b in load_file(fixdir / "optimal_system.txt") if b.kind == "claim"]
    out = optimal_system_spotcheck(algebra, fams, claims)
    assert out and all(s.passed for s in out)


def test_epsfun_parser_roundtrip():
    e = parse_epsfun("1 - 2*eps + eps^2")
    assert e == EpsFun.const(1).add(EpsFun.eps(1, -2)).add(EpsFun.eps(2))
    assert parse_epsfun("exp(3*eps/2)") == EpsFun.exp(F(3, 2))
    assert parse_epsfun("exp(-eps/2)") == EpsFun.exp(F(-1, 2))
    assert parse_epsfun("0").is_zero()


def test_epsfun_derivative():
    e = parse_epsfun("eps^2*exp(3*eps/2)")
    d = e.deriv()
    assert d == parse_epsfun("2*eps*exp(3*eps/2) + 3/2*eps^2*exp(3*eps/2)")

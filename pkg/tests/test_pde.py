"""Both PDE residuals, the hodograph relations, the Lax pair and the
prepotential embeddings."""
from fractions import Fraction as F

import pytest

from wdvvsym.kernel import Num, Var, is_identically_zero, normalize, parse, substitute
from wdvvsym.pde import (
    HodographLink,
    dubrovin_residual,
    ferapontov_residual,
    hodograph_check,
    lax_compatibility,
    prepotential_eta11_nonzero,
    prepotential_eta11_zero,
    quasi_homogeneity_check,
    wdvv1_check,
    wdvv_reduces_to_scalar_pde,
)

SCALING_F = "2*I*sqrt(2)/3*(x*y)^(3/2)"
TETRA_FF = "y^2*t^2/(4*k) + t^5/(60*k^2)"


def test_ferapontov_scaling_solution():
    assert is_identically_zero(ferapontov_residual(parse(SCALING_F)))


def test_ferapontov_cubic_with_constraint():
    res = ferapontov_residual(parse("alpha*x^3 + 3*beta*x^2*y + 3*gamma*x*y^2 + delta*y^3"))
    out = substitute(res, {Var("delta"): parse("(1 + 36*beta*gamma)/(36*alpha)")})
    assert is_identically_zero(out)


def test_ferapontov_x_cubed_leaves_minus_one():
    nf = normalize(ferapontov_residual(parse("x^3")))
    assert nf.is_const() and str(nf.const_value()) == "-1"


def test_dubrovin_solutions():
    assert is_identically_zero(dubrovin_residual(parse("y^4/(8*t)")))
    assert is_identically_zero(dubrovin_residual(parse(TETRA_FF)))
    assert is_identically_zero(dubrovin_residual(Num(0)))


def test_hodograph_scaling_pair():
    rep = hodograph_check(
        parse(SCALING_F), parse("y^4/(8*t)"), HodographLink(x_of=parse("-y^3/(2*t^2)"))
    )
    assert len(rep) == 9
    assert all(r.passed for r in rep)


def test_hodograph_tetra_pair():
    rep = hodograph_check(
        parse("k*x^3/(6*y) + y^4/(24*k)"), parse(TETRA_FF), HodographLink(x_of=parse("t*y/k"))
    )
    assert all(r.passed for r in rep)


def test_hodograph_mismatch_detected():
    rep = hodograph_check(parse(SCALING_F), parse(TETRA_FF), HodographLink(x_of=parse("t*y/k")))
    assert any(not r.passed for r in rep)


def test_hodograph_link_validation():
    with pytest.raises(Exception):
        HodographLink()
    with pytest.raises(Exception):
        HodographLink(x_of=Var("y"), t_of=Var("x"))


def test_lax_symbolic():
    rep = lax_compatibility()
    assert rep.curl_zero
    assert rep.commutator_zero_onshell


def test_lax_at_scaling():
    rep = lax_compatibility(parse(SCALING_F))
    assert rep.passed


def test_wdvv_eta_matrices():
    w = wdvv1_check(prepotential_eta11_nonzero(parse(SCALING_F)))
    assert w.eta == [[1, 0, 0], [0, 0, 1], [0, 1, 0]]
    assert w.passed and w.checked_instances == 81
    w2 = wdvv1_check(prepotential_eta11_zero(parse(TETRA_FF)))
    assert w2.eta == [[0, 0, 1], [0, 1, 0], [1, 0, 0]]
    assert w2.passed


def test_wdvv_detects_non_solution():
    w = wdvv1_check(prepotential_eta11_nonzero(parse("x^3")))
    assert w.failing_instances


def test_wdvv_symbolic_reduction_instances():
    assert len(wdvv_reduces_to_scalar_pde("f")) == 4
    assert len(wdvv_reduces_to_scalar_pde("F")) == 4


def test_quasi_homogeneity_monomial():
    q = quasi_homogeneity_check(parse("y^4/(8*t)"))
    assert q.found
    w = q.weights
    assert 4 * w["y"] - w["t"] == q.value_weight


def test_quasi_homogeneity_log_failure_is_value_not_error():
    q = quasi_homogeneity_check(
        parse("t^2*log(y)/(2*k) + y^3/k"), ("y", "t"), (), allow_affine=False
    )
    assert not q.found

"""Kernel behaviour: parsing, normal forms, calculus, numeric evaluation."""
import random
from fractions import Fraction as F

import mpmath as mp
import pytest

from wdvvsym.kernel import (
    BranchError,
    Jet,
    NormalizeError,
    Num,
    ParseError,
    Root,
    Var,
    diff,
    diff_n,
    eval_numeric,
    is_identically_zero,
    nf_equal,
    normalize,
    parse,
    partial,
    render,
    reify,
    substitute,
    subs_vars,
)

FXY = {"f": ("x", "y")}


# -- parsing ---------------------------------------------------------------


def test_parse_polynomial():
    e = parse("x^2 + 2*x*y")
    assert nf_equal(e, Var("x") ** F(2) + Num(2) * Var("x") * Var("y"))


def test_parse_scaling_solution():
    e = parse("2*I*sqrt(2)/3 * (x*y)^(3/2)")
    v = eval_numeric(e, {"x": 1, "y": 1}, 50)
    with mp.workdps(60):
        assert mp.fabs(v - mp.mpc(0, 2 * mp.sqrt(2) / 3)) < mp.mpf(10) ** -45


def test_parse_log_roundtrip():
    e = parse("log(x/y)")
    assert nf_equal(parse(render(e)), e)


def test_parse_jets():
    e = parse("f_xxy", functions=FXY)
    assert e == Jet("f", ("x", "y"), ("x", "x", "y"))
    assert parse("D(f; x, x, y)", functions=FXY) == e
    assert parse("f", functions=FXY) == Jet("f", ("x", "y"), ())


def test_parse_errors_carry_position():
    with pytest.raises(ParseError):
        parse("x + * y")
    with pytest.raises(ParseError):
        parse("x + qq", strict_symbols={"x"})
    parse("x + qq")  # lenient without a symbol list


def test_render_roundtrip_random():
    rnd = random.Random(7)
    names = ["x", "y", "k"]
    for _ in range(30):
        terms = []
        for _t in range(rnd.randint(1, 4)):
            c = F(rnd.randint(-6, 6), rnd.randint(1, 5))
            mono = Num(c)
            for n in names:
                mono = mono * Var(n) ** F(rnd.randint(0, 3))
            terms.append(mono)
        e = sum(terms, start=Num(0))
        assert nf_equal(parse(render(e)), e)


# -- normalization ----------------------------------------------------------


def test_zero_recognition():
    assert is_identically_zero(parse("(x+y)^2 - x^2 - 2*x*y - y^2"))
    assert is_identically_zero(parse("I^2 + 1"))
    assert not is_identically_zero(parse("x + y"))


def test_root_reduction():
    lam = Root("lam", parse("1 + alpha/x"))
    assert is_identically_zero(lam * lam * Var("x") - Var("x") - Var("alpha"))
    # odd powers keep one root factor
    nf = normalize(lam ** F(3))
    assert not nf.is_zero()
    assert is_identically_zero(lam ** F(3) - (Num(1) + Var("alpha") / Var("x")) * lam)


def test_root_negative_powers():
    lam = Root("lam", parse("1 + alpha/x"))
    assert is_identically_zero(lam ** F(-1) * lam - Num(1))
    assert is_identically_zero(lam ** F(-2) * (Num(1) + Var("alpha") / Var("x")) - Num(1))


def test_root_inside_fractional_power():
    lam = Root("lam", parse("1 + alpha/x"))
    e = (lam ** F(2) * Var("y") ** F(3)) ** F(1, 2)
    assert is_identically_zero(e - lam * Var("y") ** F(3, 2))


def test_power_distributes_over_monomials():
    assert is_identically_zero(parse("(x*y)^(3/2) - x^(3/2)*y^(3/2)"))
    assert is_identically_zero(parse("(4*x^2)^(1/2) - 2*x"))
    assert is_identically_zero(parse("(-x)^(1/2) - I*x^(1/2)"))


def test_fractional_power_of_sum_rejected():
    with pytest.raises(NormalizeError):
        normalize(parse("(x + y)^(1/2)"))


def test_denominator_never_zero():
    with pytest.raises(NormalizeError):
        normalize(parse("1/(x - x)"))


def test_gcd_reduction_exact():
    assert render(normalize(parse("(x^3 - y^3)/(x - y)")).to_expr()) == "x^2 + x*y + y^2"
    rnd = random.Random(3)
    for _ in range(12):
        a = sum(
            (Num(F(rnd.randint(-4, 4))) * Var("x") ** F(k + 1) for k in range(rnd.randint(1, 4))),
            start=Num(1),
        )
        b = sum(
            (Num(F(rnd.randint(-4, 4))) * Var("x") ** F(k + 1) for k in range(rnd.randint(1, 4))),
            start=Num(1),
        )
        q = normalize((a * b) / b)
        assert q.equals(normalize(a))


def test_singular_factor_not_masked_by_zero():
    with pytest.raises(NormalizeError):
        normalize((Var("x") - Var("x")) * (Num(1) / (Var("y") - Var("y"))))


def test_logs_stay_opaque():
    # log(x/y) is not split; identical atoms cancel
    assert is_identically_zero(parse("log(x/y) - log(x/y)"))
    assert not is_identically_zero(parse("log(x/y) - log(x) + log(y)"))


def test_ring_properties_random():
    rnd = random.Random(11)

    def rand_expr():
        terms = []
        for _ in range(rnd.randint(1, 3)):
            c = F(rnd.randint(-3, 3), rnd.randint(1, 3))
            terms.append(Num(c) * Var("x") ** F(rnd.randint(0, 2)) * Var("y") ** F(rnd.randint(0, 2)))
        return sum(terms, start=Num(0))

    for _ in range(15):
        a, b, c = rand_expr(), rand_expr(), rand_expr()
        assert nf_equal(a * (b + c), a * b + a * c)
        assert nf_equal((a + b) + c, a + (b + c))
        assert nf_equal(a * b, b * a)


# -- calculus -----------------------------------------------------------------


def test_power_rule():
    assert nf_equal(diff(parse("x^(3/2)"), "x"), parse("3/2*x^(1/2)"))


def test_log_rule():
    assert nf_equal(diff(parse("log(x/y)"), "x"), parse("1/x"))
    assert nf_equal(diff(parse("log(x/y)"), "y"), parse("-1/y"))


def test_root_rule_keeps_root_in_numerator():
    lam = Root("lam", parse("1 + alpha/x"))
    d = diff(lam, "x")
    expect = parse("-alpha/x^2") * lam / (Num(2) * (Num(1) + Var("alpha") / Var("x")))
    assert nf_equal(d, expect)
    nf = normalize(d)
    from wdvvsym.kernel.normal import RootBase

    assert not any(isinstance(b, RootBase) for b in nf.den.bases())


def test_jet_extension_and_sorting():
    fx = diff(Jet("f", ("x", "y"), ()), "x")
    assert fx == Jet("f", ("x", "y"), ("x",))
    # mixed partials commute through the sorted multi-index
    a = diff(diff(Jet("f", ("x", "y"), ()), "x"), "y")
    b = diff(diff(Jet("f", ("x", "y"), ()), "y"), "x")
    assert a == b


def test_diff_commutes_random():
    rnd = random.Random(5)
    f0 = Jet("f", ("x", "y"), ())
    for _ in range(8):
        e = sum(
            (
                Num(F(rnd.randint(-3, 3))) * Var("x") ** F(rnd.randint(0, 2))
                * Var("y") ** F(rnd.randint(0, 2)) * f0 ** F(rnd.randint(0, 2))
                for _ in range(3)
            ),
            start=Num(0),
        )
        assert nf_equal(diff(diff(e, "x"), "y"), diff(diff(e, "y"), "x"))


def test_product_rule_random():
    rnd = random.Random(9)
    for _ in range(8):
        a = Var("x") ** F(rnd.randint(1, 3)) * Var("y") ** F(rnd.randint(0, 2))
        b = Num(F(rnd.randint(1, 4))) * Var("x") ** F(rnd.randint(0, 2))
        assert nf_equal(diff(a * b, "x"), diff(a, "x") * b + a * diff(b, "x"))


def test_chain_map():
    # phi(z) with z = x*y via explicit chain derivatives
    phi = Jet("phi", ("z",), ())
    chain = {"z": {"x": Var("y"), "y": Var("x")}}
    d = diff(phi, "x", chain)
    assert nf_equal(d, Jet("phi", ("z",), ("z",)) * Var("y"))


def test_partial_treats_jets_as_coordinates():
    fxx = Jet("f", ("x", "y"), ("x", "x"))
    e = fxx * fxx * Var("x")
    assert nf_equal(partial(e, fxx), Num(2) * fxx * Var("x"))
    assert nf_equal(partial(e, Var("x")), fxx * fxx)


def test_substitute_simultaneous():
    e = Var("x") + Var("y")
    out = substitute(e, {Var("x"): Var("y"), Var("y"): Var("x")})
    assert nf_equal(out, e)
    assert nf_equal(subs_vars(Var("x") + Var("y"), {"x": Num(0)}), Var("y"))


def test_substitute_jets_no_rederivation():
    fyyy = Jet("f", ("x", "y"), ("y", "y", "y"))
    sol = parse("(1 + f_xxy*f_xyy)/f_xxx", functions=FXY)
    out = substitute(fyyy * Var("x"), {fyyy: sol})
    assert nf_equal(out, sol * Var("x"))


def test_strict_substitution():
    from wdvvsym.kernel import SubstitutionError

    fx = Jet("f", ("x", "y"), ("x",))
    with pytest.raises(SubstitutionError):
        substitute(fx, {}, strict_funcs=("f",))


# -- numeric evaluation --------------------------------------------------------


def test_eval_precision_contract():
    e = parse("2*I*sqrt(2)/3 * (x*y)^(3/2)")
    v50 = eval_numeric(e, {"x": 1, "y": 1}, 50)
    v100 = eval_numeric(e, {"x": 1, "y": 1}, 100)
    with mp.workdps(120):
        assert mp.fabs(v50 - v100) < mp.mpf(10) ** -48


def test_eval_log_one():
    assert eval_numeric(parse("log(x)"), {"x": 1}, 50) == 0


def test_eval_branch_error():
    with pytest.raises(BranchError):
        eval_numeric(parse("log(x)"), {"x": -1}, 50)


def test_eval_agrees_with_normalize():
    rnd = random.Random(13)
    for _ in range(10):
        e = sum(
            (
                Num(F(rnd.randint(-3, 3), rnd.randint(1, 2)))
                * Var("x") ** F(rnd.randint(-2, 3), rnd.choice([1, 2]))
                * Var("y") ** F(rnd.randint(0, 2))
                for _ in range(3)
            ),
            start=Num(0),
        )
        pt = {"x": F(rnd.randint(1, 8), 4), "y": F(rnd.randint(1, 8), 4)}
        a = eval_numeric(e, pt, 50)
        b = eval_numeric(normalize(e).to_expr(), pt, 50)
        with mp.workdps(60):
            assert mp.fabs(a - b) < mp.mpf(10) ** -40


def test_root_confluence_random_order():
    # normalizing products of root powers in any association is confluent
    lam = Root("lam", parse("1 + alpha/x + beta/x^2"))
    e1 = (lam ** F(3) * lam ** F(2)) * lam ** F(-1)
    e2 = lam ** F(3) * (lam ** F(2) * lam ** F(-1))
    e3 = lam ** F(4)
    assert normalize(e1).equals(normalize(e2))
    assert normalize(e2).equals(normalize(e3))


def test_reify_idempotent():
    e = parse("(x + y)^3/(x*y) - x")
    assert nf_equal(reify(e), e)
    assert nf_equal(reify(reify(e)), e)


def test_diff_n():
    assert nf_equal(diff_n(parse("x^4"), "x", 3), parse("24*x"))

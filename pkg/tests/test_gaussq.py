from fractions import Fraction as F

import pytest

from wdvvsym.kernel.gaussq import GaussQ, I, ONE, ZERO, rational_power


def test_basic_arithmetic():
    a = GaussQ(F(1, 2), F(3, 4))
    b = GaussQ(F(2), F(-1))
    assert a + b == GaussQ(F(5, 2), F(-1, 4))
    assert a * b == GaussQ(F(1, 2) * 2 - F(3, 4) * (-1), F(1, 2) * (-1) + F(3, 4) * 2)
    assert (a / b) * b == a
    assert -a + a == ZERO


def test_i_squares_to_minus_one():
    assert I * I == GaussQ(-1)
    assert I ** 4 == ONE
    assert I ** -1 == -I


def test_inverse_and_zero_division():
    z = GaussQ(3, 4)
    assert z * z.inverse() == ONE
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_pow_negative():
    z = GaussQ(1, 1)
    assert z ** -2 == (z * z).inverse()


def test_rational_power_integer():
    c, surds = rational_power(F(8), F(2))
    assert c == GaussQ(64) and surds == {}


def test_rational_power_sqrt():
    c, surds = rational_power(F(2), F(1, 2))
    assert c == ONE and surds == {2: F(1, 2)}
    c, surds = rational_power(F(8), F(1, 2))
    assert c == GaussQ(2) and surds == {2: F(1, 2)}
    c, surds = rational_power(F(9, 4), F(1, 2))
    assert c == GaussQ(F(3, 2)) and surds == {}


def test_rational_power_negative_base_half_integer():
    c, surds = rational_power(F(-1), F(1, 2))
    assert c == I and surds == {}
    c, surds = rational_power(F(-1), F(-1, 2))
    assert c == -I
    c, surds = rational_power(F(-2), F(3, 2))
    assert c == GaussQ(0, -2) and surds == {2: F(1, 2)}


def test_rational_power_unrepresentable_branch():
    with pytest.raises(ValueError):
        rational_power(F(-1), F(1, 3))


def test_rational_power_inverse_extraction():
    # 2^(-1/2) normalizes with the surd in the numerator
    c, surds = rational_power(F(1, 2), F(1, 2))
    assert c == GaussQ(F(1, 2)) and surds == {2: F(1, 2)}

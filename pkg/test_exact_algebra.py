"""
Tests for exact rational functions and cyclotomic arithmetic.
"""

from fractions import Fraction

import numpy as np
import pytest

from exact_algebra import (
    AlgebraError,
    CycloMatrix,
    Cyclotomic,
    DivisionByZeroError,
    RatFunc,
    cyclo_arith,
    parse_ratfunc,
    ratfunc_arith,
    variable_names,
)


def test_variable_names():
    assert variable_names("x", 3) == ("x1", "x2", "x3")
    assert variable_names("y", 0) == ()
    with pytest.raises(AlgebraError):
        variable_names("z", 2)


def test_ratfunc_reduces_to_canonical_form():
    x1, x2 = RatFunc.variables(("x1", "x2"))
    value = (x1 * x1 - x2 * x2) / (x1 + x2)
    assert value == x1 - x2
    assert (x1 + x2) / (x1 + x2) == 1
    assert ((1 + x2) / x1 - x2 / x1).is_one() is False
    assert (1 + x2) / x1 - x2 / x1 == 1 / x1


def test_ratfunc_mixed_names_are_merged():
    (x1,) = RatFunc.variables(("x1",))
    (y2,) = RatFunc.variables(("y2",))
    total = x1 + y2
    assert total.names == ("x1", "y2")
    assert total.free_variables() == ("x1", "y2")


def test_ratfunc_division_by_zero():
    (x1,) = RatFunc.variables(("x1",))
    zero = x1 - x1
    assert zero.is_zero()
    with pytest.raises(DivisionByZeroError):
        x1 / zero
    with pytest.raises(DivisionByZeroError):
        zero.inv()
    with pytest.raises(DivisionByZeroError):
        ratfunc_arith(x1, zero, "div")


def test_ratfunc_arith_dispatch():
    x1, x2 = RatFunc.variables(("x1", "x2"))
    assert ratfunc_arith(x1, x2, "add") == x1 + x2
    assert ratfunc_arith(x1, x2, "mul") == x1 * x2
    assert ratfunc_arith(x1, None, "neg") == -x1
    assert ratfunc_arith(x1, None, "inv") == 1 / x1
    with pytest.raises(AlgebraError):
        ratfunc_arith(x1, x2, "pow")


def test_ratfunc_integer_powers():
    (x1,) = RatFunc.variables(("x1",))
    assert x1 ** 3 == x1 * x1 * x1
    assert x1 ** -2 == 1 / (x1 * x1)
    with pytest.raises(AlgebraError):
        x1 ** 0.5


def test_ratfunc_evaluate_exact_and_float():
    f = parse_ratfunc("(1+x2)/x1")
    assert f.evaluate({"x1": 2, "x2": 3}) == Fraction(2)
    assert f.evaluate({"x1": Fraction(1, 3), "x2": 0}) == Fraction(3)
    assert f.evaluate({"x1": 0.5, "x2": 1.0}) == pytest.approx(4.0)
    with pytest.raises(AlgebraError):
        f.evaluate({"x1": 2})
    with pytest.raises(DivisionByZeroError):
        f.evaluate({"x1": 0, "x2": 1})


def test_ratfunc_substitute():
    x1, x2 = RatFunc.variables(("x1", "x2"))
    f = parse_ratfunc("x1 + x2")
    composed = f.substitute({"x1": x2 * x2})
    assert composed == x2 * x2 + x2


def test_parse_string_roundtrip_is_stable():
    for text in ("(1+x2)/x1", "x1^2*y3 - 4", "1/(y1+y2) + 1/2"):
        value = parse_ratfunc(text)
        assert parse_ratfunc(value.to_string()) == value
        assert parse_ratfunc(value.to_string()).to_string() == value.to_string()


def test_to_string_clears_denominators():
    value = parse_ratfunc("x1/2 + 1/3")
    assert "/" in value.to_string()
    assert parse_ratfunc(value.to_string()) == value
    assert parse_ratfunc("0").to_string() == "0"


@pytest.mark.parametrize("text", ["", "x1 +", "z1 + 1", "x0", "x1 ** 2 $"])
def test_parse_rejects_malformed(text):
    with pytest.raises(AlgebraError):
        parse_ratfunc(text)


def test_parse_division_by_zero():
    with pytest.raises(DivisionByZeroError):
        parse_ratfunc("x1/0")


def test_cyclotomic_zeta_has_order_m():
    for m in (1, 2, 3, 4, 5, 6, 10):
        z = Cyclotomic.zeta(m)
        assert z ** m == 1
        assert Cyclotomic.zeta(m, m) == Cyclotomic.one(m)


def test_cyclotomic_relation_is_reduced():
    z = Cyclotomic.zeta(3)
    # 1 + z + z^2 = 0 in Q(zeta_3)
    assert (1 + z + z * z).is_zero()
    assert Cyclotomic(3, [1, 1, 1]).is_zero()


def test_cyclotomic_field_inverse():
    for m in (4, 5, 7, 12):
        a = Cyclotomic(m, [2, 0, 1]) if m > 4 else Cyclotomic(m, [2, 1])
        assert a * a.inv() == 1
        assert cyclo_arith(a, None, "inv") == a.inv()
    with pytest.raises(DivisionByZeroError):
        Cyclotomic.zero(5).inv()


def test_cyclotomic_conjugate_and_complex_value():
    m = 8
    z = Cyclotomic.zeta(m, 3)
    assert z.to_complex() == pytest.approx(np.exp(2j * np.pi * 3 / m))
    assert z.conjugate().to_complex() == pytest.approx(np.exp(-2j * np.pi * 3 / m))
    assert z * z.conjugate() == 1


def test_cyclotomic_order_mismatch():
    with pytest.raises(AlgebraError):
        Cyclotomic.zeta(3) + Cyclotomic.zeta(5)
    with pytest.raises(AlgebraError):
        cyclo_arith(Cyclotomic.zeta(3), Cyclotomic.zeta(3), "div")
    with pytest.raises(AlgebraError):
        Cyclotomic(0, [1])


def test_cyclo_matrix_inverse_and_kron():
    m = 6
    z = Cyclotomic.zeta(m)
    one = Cyclotomic.one(m)
    A = CycloMatrix.from_entries(m, 2, {(0, 0): one, (0, 1): z, (1, 1): z * z})
    identity = CycloMatrix.identity(m, 2)
    assert (A @ A.inverse()).equals(identity)
    K = A.kron(identity)
    assert K.dim == 4
    assert np.allclose(K.to_numpy(), np.kron(A.to_numpy(), np.eye(2)))


def test_cyclo_matrix_singular():
    m = 4
    one = Cyclotomic.one(m)
    S = CycloMatrix.from_entries(m, 2, {(0, 0): one, (0, 1): one, (1, 0): one, (1, 1): one})
    with pytest.raises(DivisionByZeroError):
        S.inverse()

from fractions import Fraction

import pytest
import sympy

from enmf.field import (
    FieldError, QuadraticScalar, format_scalar, make_field, parse_scalar, pow2_exponent,
    round_pow2,
)

S5 = sympy.sqrt(5)


def _sym(x: QuadraticScalar):
    return sympy.Rational(x.rat.numerator, x.rat.denominator) + \
        sympy.Rational(x.irr.numerator, x.irr.denominator) * S5


def _zero(expr) -> bool:
    return sympy.expand(sympy.radsimp(expr)) == 0


def _rand_q(rng):
    return QuadraticScalar(Fraction(rng.randint(-30, 30), rng.randint(1, 12)),
                           Fraction(rng.randint(-30, 30), rng.randint(1, 12)))


@pytest.mark.parametrize("text", ["0", "1", "-3/4", "(7/2)+(-3/2)*sqrt(5)", "(0)+(1)*sqrt(5)"])
def test_parse_format_round_trip(text):
    x = parse_scalar(text)
    assert parse_scalar(format_scalar(x)) == x


def test_parse_accepts_loose_spacing():
    assert parse_scalar(" ( 1/2 ) + ( 1/2 ) * sqrt( 5 ) ") == QuadraticScalar(Fraction(1, 2),
                                                                             Fraction(1, 2))


@pytest.mark.parametrize("bad", ["", "abc", "1/0", "(1)+(2)*sqrt(3)"])
def test_parse_rejects_garbage(bad):
    with pytest.raises((ValueError, FieldError, ZeroDivisionError)):
        parse_scalar(bad, 5)


def test_arithmetic_matches_sympy(rng):
    for _ in range(200):
        a, b = _rand_q(rng), _rand_q(rng)
        sa, sb = _sym(a), _sym(b)
        assert _zero(_sym(a + b) - (sa + sb))
        assert _zero(_sym(a - b) - (sa - sb))
        assert _zero(_sym(a * b) - (sa * sb))
        if b:
            assert _zero(_sym(a / b) - sa / sb)


def test_sign_matches_sympy(rng):
    for _ in range(300):
        a = _rand_q(rng)
        expected = sympy.sign(_sym(a))
        assert a.sign() == expected


def test_sign_of_near_cancellation():
    # golden-ratio powers give tiny positive differences
    phi = QuadraticScalar(Fraction(1, 2), Fraction(1, 2))
    x = phi ** 30 - QuadraticScalar(Fraction(1860498))
    assert x.sign() == sympy.sign(((1 + S5) / 2) ** 30 - 1860498)


def test_conjugate_and_norm():
    x = QuadraticScalar(3, 2)
    assert x * x.conjugate() == QuadraticScalar(x.norm())
    assert x.norm() == 9 - 20


def test_pow2_exponent_brackets(rng):
    for _ in range(100):
        a = abs(_rand_q(rng)) + QuadraticScalar(Fraction(1, 1000))
        z = pow2_exponent(a, "down")
        assert QuadraticScalar(Fraction(2) ** z) <= a < QuadraticScalar(Fraction(2) ** (z + 1))
        u = pow2_exponent(a, "up")
        assert QuadraticScalar(Fraction(2) ** (u - 1)) < a <= QuadraticScalar(Fraction(2) ** u)


def test_round_pow2_exact_on_powers():
    assert round_pow2(QuadraticScalar(Fraction(1, 8)), "up") == Fraction(1, 8)
    assert round_pow2(QuadraticScalar(Fraction(1, 8)), "down") == Fraction(1, 8)
    assert round_pow2(0.3, "down") == 0.25
    assert round_pow2(0.3, "up") == 0.5


def test_pow2_rejects_nonpositive():
    with pytest.raises(FieldError):
        pow2_exponent(QuadraticScalar(0))
    with pytest.raises(FieldError):
        pow2_exponent(-1.0)


def test_float_field_tolerance():
    f = make_field("float", tol=1e-6)
    assert f.sign(5e-7) == 0
    assert f.sign(2e-6) == 1
    assert f.parse("(1/2)+(1/2)*sqrt(5)") == pytest.approx((1 + 5 ** 0.5) / 2)


def test_exact_field_refuses_floats():
    f = make_field("exact")
    with pytest.raises(FieldError):
        f(0.5)


def test_field_backends():
    assert make_field("exact").exact and not make_field("float").exact
    with pytest.raises(ValueError):
        make_field("decimal")

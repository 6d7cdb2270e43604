from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasimodular.exactalg import (
    ExponentOverflowError,
    LaurentPoly,
    PolySyntaxError,
    content_primitive,
    coprimality_certificate,
    divides,
    format_poly,
    gcd_multivariate,
    normalize,
    parse_poly,
    partial_derivative,
    poly_add,
    poly_mul,
    reduced_form,
    weighted_degree,
)
from strategies import laurent, nonzero_polynomials, polynomials, small_polynomials

P = parse_poly


@pytest.mark.parametrize("p, q, expected", [
    ("x^2 - y", "y", "x^2"),
    ("x^2 - y", "0", "x^2 - y"),
    ("x^2 - y", "x^3 - 3*x*y + 2*z", "x^3 + x^2 - 3*x*y - y + 2*z"),
])
def test_add(p, q, expected):
    assert poly_add(P(p), P(q)) == P(expected)


@pytest.mark.parametrize("p, q, expected", [
    ("x^2 - y", "1", "x^2 - y"),
    ("y", "y^-1", "1"),
    ("x - y", "x + y", "x^2 - y^2"),
])
def test_mul(p, q, expected):
    assert poly_mul(P(p), P(q)) == P(expected)


@pytest.mark.parametrize("p, var, expected", [
    ("x^2 - y", "x", "2*x"),
    ("y^-1*z^2", "y", "-y^-2*z^2"),
    ("x^3 - 3*x*y + 2*z", "x", "3*x^2 - 3*y"),
])
def test_partial_derivative(p, var, expected):
    assert partial_derivative(P(p), var) == P(expected)


@pytest.mark.parametrize("p, expected", [("x^2 - y", 2), ("x + y", None), ("y^-2*z^5", 11), ("0", None)])
def test_weighted_degree(p, expected):
    assert weighted_degree(P(p)) == expected


@pytest.mark.parametrize("p, numerator, ell", [
    ("x^2 - y", "x^2 - y", 0),
    ("3*x*z - 2*y^2 - z^2*y^-1", "3*x*y*z - 2*y^3 - z^2", 1),
    ("x*y^2", "x*y^2", 0),
])
def test_reduced_form(p, numerator, ell):
    rf = reduced_form(P(p))
    assert rf.numerator == P(numerator) and rf.ell == ell
    assert rf.value() == P(p)


@pytest.mark.parametrize("p, var, content, primitive", [
    ("x*y + x*z", "y", "x", "y + z"),
    ("x^2", "x", "1", "x^2"),
    ("2*x + 2*y", "x", "2", "x + y"),
])
def test_content_primitive(p, var, content, primitive):
    c, prim = content_primitive(P(p), var)
    assert (c, prim) == (P(content), P(primitive))


def test_content_primitive_rejects_laurent():
    with pytest.raises(ValueError):
        content_primitive(P("y^-1*x"), "x")


def test_gcd_examples():
    f = P("3*x^4*y - 18*x^2*y^2 + 24*x*y*z - 5*y^3 - 4*z^2")
    assert gcd_multivariate(P("x^2 - y"), P("x^3 - 3*x*y + 2*z")) == 1
    assert gcd_multivariate(f, f) == normalize(f)
    assert gcd_multivariate(P("x*y^3 - x*z^2"), P("x*y")) == P("x")
    with pytest.raises(ValueError):
        gcd_multivariate(P("0"), P("0"))


def test_gcd_normalization():
    g = gcd_multivariate(P("-6*x^2 + 6*y"), P("-4*x^2 + 4*y"))
    assert g == P("x^2 - y")


@pytest.mark.parametrize("p, q, expected", [
    ("x^2 - y", "x^3 - 3*x*y + 2*z", True),
    ("x*y", "x*z", False),
    ("x", "y", True),
])
def test_certificate(p, q, expected):
    assert coprimality_certificate(P(p), P(q)) is expected


@pytest.mark.parametrize("text", [
    "x^2 - y",
    "3*x^4*y - 18*x^2*y^2 + 24*x*y*z - 5*y^3 - 4*z^2",
    "y^-2*z^5",
    "7/3*y^-1*z^2 - 1/8*x^2",
])
def test_canonical_text_round_trip(text):
    assert format_poly(P(text)) == text


def test_parse_whitespace_and_order_insensitive():
    assert P(" - y+x^2 ") == P("x^2 - y")
    assert P("4*z  + 2*x^3 - 6*x*y") == P("2*x^3 - 6*x*y + 4*z")


@pytest.mark.parametrize("bad", ["x^2 +* y", "x^", "w", "x^-1", "3/0*x", "x^2 y"])
def test_parse_errors_carry_position(bad):
    with pytest.raises(PolySyntaxError) as err:
        P(bad)
    assert "position" in str(err.value)


def test_exponent_overflow():
    with pytest.raises(ExponentOverflowError):
        P("x^4294967296")
    with pytest.raises(ExponentOverflowError):
        P("y^1073741824") ** 2


def test_no_zero_coefficients_stored():
    p = P("x + y") - P("y")
    assert dict(p.terms) == {(1, 0, 0): 1}
    assert LaurentPoly({(0, 1, 0): Fraction(0)}).is_zero()


def test_rational_coefficients_are_reduced():
    c = P("2/4*x").coefficient((1, 0, 0))
    assert c == Fraction(1, 2) and c.denominator == 2
    assert type(P("4/2*x").coefficient((1, 0, 0))) is int


# properties --------------------------------------------------------------


@given(laurent, laurent, laurent)
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p + q == q + p and p * q == q * p
    assert p * (q + r) == p * q + p * r
    assert p - p == 0 and p * 1 == p


@given(laurent, laurent, st.sampled_from("xyz"))
def test_leibniz(p, q, v):
    assert partial_derivative(p * q, v) == p * partial_derivative(q, v) + q * partial_derivative(p, v)


@given(laurent)
def test_mixed_partials_commute(p):
    for u, v in (("x", "y"), ("x", "z"), ("y", "z")):
        assert p.diff(u).diff(v) == p.diff(v).diff(u)


@given(laurent)
def test_reduced_form_minimal(p):
    rf = reduced_form(p)
    assert rf.numerator.is_polynomial()
    assert rf.numerator * LaurentPoly.monomial(0, -rf.ell, 0) == p
    if rf.ell > 0:
        assert rf.numerator.min_degree("y") == 0


@settings(max_examples=60, deadline=None)
@given(nonzero_polynomials, polynomials)
def test_gcd_divides_and_is_symmetric(p, q):
    g = gcd_multivariate(p, q)
    assert divides(g, p) and divides(g, q)
    assert g == gcd_multivariate(q, p)


@given(nonzero_polynomials)
def test_gcd_with_zero_is_normalized_input(p):
    assert gcd_multivariate(p, LaurentPoly()) == normalize(p)


@settings(max_examples=40, deadline=None)
@given(small_polynomials, small_polynomials, small_polynomials)
def test_gcd_recovers_planted_factor(a, b, c):
    if a.is_zero() or b.is_zero() or c.is_zero():
        return
    g = gcd_multivariate(a * b, a * c)
    assert divides(normalize(a), g)


@settings(max_examples=80, deadline=None)
@given(nonzero_polynomials, nonzero_polynomials)
def test_certificate_sound(p, q):
    if coprimality_certificate(p, q):
        assert gcd_multivariate(p, q) == 1


@settings(max_examples=1000, deadline=None)
@given(laurent)
def test_format_parse_round_trip(p):
    text = format_poly(p)
    assert P(text) == p
    assert format_poly(P(text)) == text

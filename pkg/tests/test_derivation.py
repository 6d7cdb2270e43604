from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasimodular.derivation import (
    GENERATORS,
    GENERATOR_WTDEG,
    LatticePoint,
    apply_D,
    apply_D_product_rule,
    apply_D_tilde,
    coefficient,
    denominator_profile,
    get_level,
    iterate_D,
    iterate_D_fresh,
    lattice_points,
    lattice_to_monomial,
    monomial_to_lattice,
    serre_derivative,
)
from quasimodular.exactalg import LaurentPoly, parse_poly, weighted_degree
from strategies import laurent

P = parse_poly
levels = st.sampled_from((1, 2, 3))


@pytest.mark.parametrize("N, m, d", [(1, 3, 12), (2, 4, 8), (3, 6, 6)])
def test_level_constants(N, m, d):
    lv = get_level(N)
    assert (lv.m, lv.d) == (m, d) and lv.d * (lv.m - 2) == 4 * lv.m


def test_level_validation():
    with pytest.raises(ValueError):
        get_level(5)
    with pytest.raises(ValueError):
        iterate_D(2, "w", 1)
    with pytest.raises(ValueError):
        iterate_D(2, "x", -1)


def test_apply_D_examples():
    assert apply_D(2, P("x")) == P("1/8*x^2 - 1/8*y")
    for N in (1, 2, 3):
        assert apply_D(N, P("1")) == 0
    assert apply_D(2, P("y^-2*z^5"), scaled=True) == P("22*x*y^-2*z^5 - 2*y^-3*z^6 - 20*z^4")


def test_apply_D_tilde_examples():
    assert apply_D_tilde(2, P("x")) == P("1/4*x")
    assert apply_D_tilde(3, P("z")) == P("z")
    assert apply_D_tilde(1, P("1")) == 0


def test_serre_examples():
    assert serre_derivative(1, 12, P("y^3 - z^2")) == 0
    assert serre_derivative(1, 4, P("y")) == P("-1/3*z")
    assert serre_derivative(2, 4, P("y")) == P("-1/2*z")
    with pytest.raises(ValueError):
        serre_derivative(1, 4, P("x"))


def test_iterate_examples():
    assert iterate_D(2, "x", 2) == P("2*x^3 - 6*x*y + 4*z")
    assert iterate_D(3, "x", 3) == P("6*x^4 - 36*x^2*y + 48*x*z - 6*y^2 - 12*y^-1*z^2")
    for N in (1, 2, 3):
        assert iterate_D(N, "y", 0) == P("y")


def test_unscaled_iterate_divides_by_d_power():
    for N in (1, 2, 3):
        d = get_level(N).d
        assert iterate_D(N, "z", 4, scaled=False) == iterate_D(N, "z", 4).scale(Fraction(1, d ** 4))


@pytest.mark.parametrize("N, gen, n, expected", [(2, "x", 10, (2, 2)), (2, "x", 3, (1, 1)), (3, "x", 6, (3, 3))])
def test_denominator_profile_examples(N, gen, n, expected):
    assert denominator_profile(N, gen, n) == expected


@pytest.mark.parametrize("N, n_max", [(1, 12), (2, 20), (3, 18)])
def test_denominator_laws(N, n_max):
    for gen in GENERATORS:
        for n in range(n_max + 1):
            observed, predicted = denominator_profile(N, gen, n)
            assert observed == predicted, (gen, n)
            if N == 1:
                assert observed == 0


def test_lattice_examples():
    assert monomial_to_lattice((1, 0, 0), 0) == LatticePoint(0, 0)
    assert monomial_to_lattice((0, -2, 5), 10) == LatticePoint(-1, -5)
    assert monomial_to_lattice((2, 0, 0), 1) == LatticePoint(1, 0)
    assert LatticePoint(-1, -5) in lattice_points(2, "x", 10)
    assert lattice_to_monomial(LatticePoint(-1, -5), 10) == (0, -2, 5)


@pytest.mark.parametrize("N, gen, r, mono, expected", [
    (2, "x", 2, (0, 0, 1), 4),
    (3, "x", 3, (0, -1, 2), -12),
    (3, "x", 2, (0, 0, 1), 4),
    (2, "x", 2, (5, 0, 0), 0),
])
def test_coefficient(N, gen, r, mono, expected):
    assert coefficient(N, gen, r, mono) == expected


def test_levels_agree_on_z_free_input():
    for N in (1, 2, 3):
        assert iterate_D(N, "x", 2) == P("2*x^3 - 6*x*y + 4*z")
    f = P("x^3*y^-2 - 5*x*y + 7")
    outs = {apply_D(N, f, scaled=True) for N in (1, 2, 3)}
    assert len(outs) == 1


@pytest.mark.parametrize("N", [1, 2, 3])
def test_degree_raising(N):
    for gen in GENERATORS:
        for n in range(12):
            assert weighted_degree(iterate_D(N, gen, n)) == GENERATOR_WTDEG[gen] + n


@given(levels, laurent, laurent)
def test_leibniz(N, f, g):
    assert apply_D(N, f * g) == f * apply_D(N, g) + g * apply_D(N, f)


@settings(deadline=None)
@given(levels, laurent)
def test_kernel_matches_product_rule(N, f):
    assert apply_D(N, f, scaled=True) == apply_D_product_rule(N, f, scaled=True)


def test_cache_coherence():
    for N in (1, 2, 3):
        for gen in GENERATORS:
            assert iterate_D(N, gen, 9) == iterate_D_fresh(N, LaurentPoly.var(gen), 9)

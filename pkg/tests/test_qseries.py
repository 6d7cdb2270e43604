from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasimodular.derivation import GENERATORS, iterate_D
from quasimodular.exactalg import parse_poly as P
from quasimodular.qseries import (
    EtaQuotientSpec,
    QSeries,
    bernoulli,
    delta_N,
    divisor_sums,
    eisenstein,
    eisenstein_fricke,
    eta_quotient,
    hauptmodul,
    rho_inverse_eval,
    verify_ramanujan,
    verify_rho_consistency,
)


def series(lead, coeffs, trunc):
    return QSeries(lead, coeffs, trunc)


@pytest.mark.parametrize("k, b", [(2, Fraction(1, 6)), (4, Fraction(-1, 30)), (6, Fraction(1, 42)),
                                  (12, Fraction(-691, 2730))])
def test_bernoulli(k, b):
    assert bernoulli(k) == b


def test_bernoulli_rejects_odd():
    with pytest.raises(ValueError):
        bernoulli(3)


def test_divisor_sums():
    assert divisor_sums(1, 7) == [0, 1, 3, 4, 7, 6, 12]
    assert divisor_sums(3, 4)[3] == 28


@pytest.mark.parametrize("k, prec, coeffs", [(2, 3, [1, -24, -72]), (4, 2, [1, 240]), (6, 2, [1, -504])])
def test_eisenstein(k, prec, coeffs):
    assert eisenstein(k, prec) == series(0, coeffs, prec)


@pytest.mark.parametrize("N, k, prec, coeffs", [(1, 4, 2, [1, 240]), (2, 2, 3, [1, -8, -40]), (3, 2, 2, [1, -6])])
def test_eisenstein_fricke(N, k, prec, coeffs):
    assert eisenstein_fricke(N, k, prec) == series(0, coeffs, prec)


@pytest.mark.parametrize("k", [2, 4, 6, 8])
def test_fricke_level_one_is_eisenstein(k):
    assert eisenstein_fricke(1, k, 60) == eisenstein(k, 60)


def test_theta_examples():
    assert QSeries.one(5).theta().is_zero()
    assert (QSeries.monomial(-1, 1, 4) + 24).theta() == QSeries.monomial(-1, -1, 4)
    assert eisenstein(2, 3).theta() == series(1, [-24, -144], 3)


def test_eta_quotients():
    assert eta_quotient(EtaQuotientSpec(((1, 24), (2, -24))), 1) == series(-1, [1, -24], 1)
    assert eta_quotient(EtaQuotientSpec(((1, 24), (1, -24))), 10) == QSeries.one(10)
    lead = eta_quotient(EtaQuotientSpec(((2, 24), (1, -24))), 5).scale(2 ** 12)
    assert lead.lead == 1 and lead.coefficient(1) == 4096
    with pytest.raises(ValueError):
        EtaQuotientSpec(((1, 1),))


def test_hauptmoduls():
    j2, j3 = hauptmodul(2, 30), hauptmodul(3, 30)
    assert j2.lead == j3.lead == -1
    assert j2.coefficient(-1) == j3.coefficient(-1) == 1
    assert j2.coefficient(0) == 0 and j2.coefficient(1) == 4372
    eta3 = eta_quotient(EtaQuotientSpec(((1, 12), (3, -12))), 2)
    assert j3.coefficient(0) == 12 + eta3.coefficient(0)
    assert hauptmodul(2, 12) == j2.truncate(12)


def test_delta():
    d1 = delta_N(1, 40)
    assert d1.coefficient(0) == 0 and d1.coefficient(1) == 1728 and d1.coefficient(2) == -41472
    tau = eta_quotient(EtaQuotientSpec(((1, 24),)), 40)
    assert d1 == tau.scale(1728)
    for N in (2, 3):
        assert delta_N(N, 20).lead >= 1


@pytest.mark.parametrize("N", [1, 2, 3])
def test_ramanujan(N):
    report = verify_ramanujan(N, 50)
    assert report.ok and len(report.checks) == 3


def test_ramanujan_detects_perturbation(monkeypatch):
    from quasimodular import qseries
    real = qseries.eisenstein_fricke

    def bent(level, k, prec):
        s = real(level, k, prec)
        return s + QSeries.monomial(7, 1, prec) if k == 4 and prec > 7 else s

    monkeypatch.setattr(qseries, "eisenstein_fricke", bent)
    assert not verify_ramanujan(2, 30).ok


def test_rho_inverse_examples():
    for N in (1, 2, 3):
        assert rho_inverse_eval(P("x"), N, 30) == eisenstein_fricke(N, 2, 30)
    assert rho_inverse_eval(P("y^3 - z^2"), 1, 30) == delta_N(1, 30)
    assert rho_inverse_eval(P("1/8*x^2 - 1/8*y"), 2, 30) == eisenstein_fricke(2, 2, 30).theta()


@pytest.mark.parametrize("N, gen, n", [(2, "x", 1), (1, "y", 0), (3, "z", 4), (3, "x", 6)])
def test_rho_consistency(N, gen, n):
    assert verify_rho_consistency(N, gen, n, 40).ok


def test_rho_detects_wrong_iterate():
    wrong = iterate_D(2, "x", 3) + P("y^-1*z^2")
    good = iterate_D(2, "x", 3, scaled=False)
    target = eisenstein_fricke(2, 2, 30).theta().theta().theta()
    assert rho_inverse_eval(good, 2, 30) == target
    assert rho_inverse_eval(wrong.scale(Fraction(1, 512)), 2, 30) != target


def test_serialize_round_trip():
    s = hauptmodul(2, 6).scale(Fraction(1, 3))
    text = s.serialize()
    assert text.startswith("-1; 6; 1/3, 0, ")
    assert QSeries.deserialize(text) == s


def test_truncation_rules():
    a, b = eisenstein(4, 10), eisenstein(6, 7)
    assert (a + b).trunc == 7 and (a * b).trunc == 7
    j = hauptmodul(2, 10)
    assert (j * j).trunc == 9
    assert j.inverse().lead == 1
    with pytest.raises(IndexError):
        a.coefficient(10)


@pytest.mark.parametrize("op", [
    lambda p: eisenstein(4, p) * eisenstein(6, p),
    lambda p: eisenstein_fricke(2, 4, p).inverse(),
    lambda p: eisenstein_fricke(3, 6, p) ** 2 / eisenstein_fricke(3, 4, p),
    lambda p: hauptmodul(3, p),
    lambda p: delta_N(2, p).theta(),
])
def test_truncation_coherence(op):
    low, high = op(25), op(60)
    assert low.trunc <= high.trunc
    assert high.truncate(low.trunc) == low


small_series = st.builds(
    lambda lead, cs, extra: QSeries(lead, cs, lead + len(cs) + extra),
    st.integers(-2, 2),
    st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=5), min_size=1, max_size=8),
    st.integers(0, 3),
)


@given(small_series, small_series)
def test_theta_is_derivation(f, g):
    assert (f * g).theta() == f * g.theta() + g * f.theta()


@settings(deadline=None)
@given(st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=5), min_size=1, max_size=10),
       st.fractions(min_value=1, max_value=9, max_denominator=5))
def test_inverse(tail, const):
    f = QSeries(0, [const] + tail, len(tail) + 1)
    assert f * f.inverse() == QSeries.one(f.trunc)

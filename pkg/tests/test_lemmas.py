import pytest

from quasimodular import lemmas
from quasimodular.derivation import GENERATORS
from quasimodular.exactalg import parse_poly as P


def _all_pass(report):
    assert report.ok, [(c.name, c.note) for c in report.failures]
    return report


@pytest.mark.parametrize("N, r", [(2, 0), (2, 10), (3, 7), (2, 20), (3, 20)])
def test_lattice_constraints(N, r):
    _all_pass(lemmas.verify_lattice_constraints(N, r))


def test_congruence_examples():
    report = _all_pass(lemmas.verify_congruences(2, 1))
    assert any("mod 5" in c.name for c in report.checks)
    report = _all_pass(lemmas.verify_congruences(3, 1))
    assert any("-12" in c.name or c.witness.get("value") == -12 for c in report.checks)


@pytest.mark.parametrize("N, f, n", [(2, "x", 1), (3, "y^3 - z^2", 2), (1, "1", 3), (2, "x^2*y^-3*z", 4)])
def test_interplay(N, f, n):
    _all_pass(lemmas.verify_interplay(N, P(f), n))


def test_interplay_detects_wrong_operator(monkeypatch):
    from quasimodular import derivation
    real = derivation.apply_D_tilde
    monkeypatch.setattr(lemmas, "apply_D_tilde", lambda lv, f: real(lv, f) * 2)
    assert not lemmas.verify_interplay(2, P("x*y"), 2).ok


@pytest.mark.parametrize("N", [1, 2, 3])
def test_scalar_relations(N):
    _all_pass(lemmas.verify_scalar_relations(N, 6))


def test_theta_e2_numerators_level2():
    nums = lemmas.prop41_numerators(2)
    assert nums[1] == P("x^2 - y")
    assert nums[3] == P("3*x^4*y - 18*x^2*y^2 + 24*x*y*z - 5*y^3 - 4*z^2")
    assert nums[4] == P("3*x^5*y - 30*x^3*y^2 + 60*x^2*y*z - 25*x*y^3 + 12*y^2*z - 20*x*z^2")


def test_theta_e2_numerators_flag_inhomogeneous_term():
    report = _all_pass(lemmas.verify_prop41(2, prec=None))
    notes = " ".join(c.note for c in report.checks)
    assert "25*x*y^2" in notes and "25*x*y^3" in notes


@pytest.mark.parametrize("N, gen, n", [(2, "x", 1), (1, "y", 2), (3, "z", 4)])
def test_ngcd_examples(N, gen, n):
    assert lemmas.verify_ngcd(N, gen, n)


def test_ngcd_reports_nontrivial_gcd():
    assert lemmas.ngcd(P("x*y^-1 + x*z"), P("x^2")) == P("x")


def test_lemma_suite_level1_small():
    _all_pass(lemmas.lemma_suite(1, n_max=4))


def test_cache_coherence_report():
    for gen in GENERATORS:
        _all_pass(lemmas.verify_cache_coherence(3, gen, 6))

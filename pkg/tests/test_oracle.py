from dataclasses import replace
from fractions import Fraction as F

import pytest

import jackgas.oracle as oracle
from jackgas.ensemble import CaseParams
from jackgas.jack import HomAlpha, Plancherel, eval_jack
from jackgas.oracle import (
    closed_coefficients, degree_sums, expected_size_closed, jack_plancherel, pmf_instances, run_suite,
    small_instances, verify_conjugation_duality, verify_jack_plancherel_identity, verify_moment_identities,
    verify_nekrasov_polynomial, verify_normalization, verify_pmf_match, verify_symmetry,
)
from jackgas.partitions import partitions_of


def test_case_ii_normalization_is_exact():
    p = CaseParams("II", theta=F(1, 2), N=2, M=3, a=F(1, 2), b=F(2, 3))
    rep = verify_normalization(p)
    assert rep.ok and rep.details["exact"]
    assert sum(degree_sums(p, 6), F(0)) == (1 + F(1, 3)) ** 6


def test_degree_sums_match_taylor_coefficients():
    p = CaseParams("VI", theta=F(2), N=2, t1=F(1, 4), t2=F(1, 5))
    assert degree_sums(p, 5) == closed_coefficients(p, 5)


def test_single_site_examples():
    # Case IV, N = M = 1, theta = 1, ab = 1/4: H = 4/3 and E|lam| = 1/3
    p = CaseParams("IV", theta=F(1), N=1, M=1, a=F(1, 2), b=F(1, 2))
    assert expected_size_closed(p) == F(1, 3)
    assert verify_normalization(p).ok
    p = CaseParams("V", theta=F(1), N=1, a=F(2), t=F(1))
    assert expected_size_closed(p) == 2
    assert verify_moment_identities(p).ok


def test_normalization_detects_wrong_closed_form(monkeypatch):
    p = CaseParams("III", theta=F(1, 2), N=2, a=F(1, 3), t=F(1, 4))
    real = oracle._series_data

    def off(q):
        kind, c, x = real(q)
        return kind, c, x * F(101, 100)

    monkeypatch.setattr(oracle, "_series_data", off)
    rep = verify_normalization(p)
    assert rep.status == "fail" and rep.witness == 1


@pytest.mark.parametrize("theta", [F(1, 2), F(1), F(2)])
def test_pmf_instances(theta):
    for p, R in pmf_instances(theta):
        assert verify_pmf_match(p, R).ok


@pytest.mark.parametrize("theta", [F(1, 2), F(2)])
def test_nekrasov(theta):
    for p, R in pmf_instances(theta):
        rep = verify_nekrasov_polynomial(p, R)
        assert rep.ok, rep


def test_nekrasov_detects_wrong_weights(monkeypatch):
    real = oracle.build_model

    def bad(p, R=None, unbounded=False):
        m = real(p, R, unbounded)
        return replace(m, phi_plus=tuple(1.1 * v for v in m.phi_plus))

    monkeypatch.setattr(oracle, "build_model", bad)
    p = CaseParams("II", theta=F(1, 2), N=2, M=3, a=F(1, 2), b=F(2, 3))
    assert not verify_nekrasov_polynomial(p).ok


def test_nekrasov_single_particle():
    p = CaseParams("VI", theta=F(1, 2), N=1, t1=F(1, 2), t2=F(1, 3), d=1)
    assert verify_nekrasov_polynomial(p).deviation < 1e-12


def test_jack_plancherel():
    for n in range(5):
        assert sum(jack_plancherel(l, F(2, 3)) for l in partitions_of(n)) == 1
    assert verify_jack_plancherel_identity(5, F(3, 2)).ok
    # plancherel weights coincide with J(tau_1) J~(tau_1) n!/theta^n ... at theta = 1 they are (dim)^2/n!
    assert jack_plancherel((2, 1), 1) == F(4, 6)
    lam = (2, 1)
    s = F(1)
    assert eval_jack(lam, Plancherel(s), 1) ** 2 == jack_plancherel(lam, 1) / 6 * 1


def test_symmetry_and_duality():
    for p in small_instances(F(1, 2)):
        assert verify_symmetry(p, 6).ok
    assert verify_conjugation_duality(F(1, 3), F(2, 5), 2, 2, F(3)).ok


def test_moment_identities_exact():
    for p in small_instances(F(2)):
        rep = verify_moment_identities(p)
        assert rep.ok, rep


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nonsense")


def test_report_serializes():
    import json
    rep = verify_pmf_match(*pmf_instances(F(1))[0])
    json.dumps(rep.to_dict())

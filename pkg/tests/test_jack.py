from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from jackgas.jack import (
    DegreeCapError, HomAlpha, HomBeta, Plancherel, SymFuncExpr, dual_scale_factor, eval_jack,
    jack_in_p_basis, omega_theta, power_product_norm, power_sum, power_sum_value, scalar_product,
    specialize, to_monomial_basis,
)
from jackgas.partitions import Partition, conjugate, partitions_of, reverse_lex_compare

THETAS = [F(1, 3), F(1, 2), F(1), F(2), F(3)]


def test_power_product_norm():
    th = F(2, 5)
    assert power_product_norm((2,), th) == 2 / th
    assert power_product_norm((1, 1), th) == 2 / th**2
    assert power_product_norm((), th) == 1


def test_small_jacks():
    assert jack_in_p_basis((1,), F(3)) == power_sum(1)
    e2 = SymFuncExpr({(1, 1): F(1, 2), (2,): F(-1, 2)})
    for th in THETAS:
        assert jack_in_p_basis((1, 1), th) == e2
    assert jack_in_p_basis((2,), 1) == SymFuncExpr({(1, 1): F(1, 2), (2,): F(1, 2)})


def test_degree_cap():
    with pytest.raises(DegreeCapError):
        jack_in_p_basis((6, 5), 1, degree_cap=10)


def test_dual_scale_factor():
    assert dual_scale_factor((1,), F(2, 7)) == F(2, 7)
    assert dual_scale_factor((), F(2)) == 1
    assert dual_scale_factor((2,), F(1, 2)) == F(3, 8)


def test_specialize_power_sums():
    a, th = F(2, 3), F(1, 2)
    assert specialize(power_sum(1), HomAlpha(a, 4), th) == 4 * a
    assert specialize(power_sum(2), Plancherel(F(5)), th) == 0
    assert power_sum_value(2, HomBeta(a, 3), th) == -3 * a**2 / th


def test_eval_jack_examples():
    assert eval_jack((1,), HomAlpha(F(3, 4), 5), F(2)) == 5 * F(3, 4)
    assert eval_jack((2,), HomAlpha(1, 2), F(1, 2)) == F(8, 3)
    s = F(7, 3)
    for th in THETAS:
        assert eval_jack((1,), Plancherel(s), th, dual=True) == th * s


def test_omega():
    th = F(3, 2)
    assert omega_theta(power_sum(1), th) == power_sum(1).scale(1 / th)
    assert omega_theta(power_sum(2), th) == power_sum(2).scale(-1 / th)
    p21 = SymFuncExpr({(2, 1): F(1)})
    assert omega_theta(p21, th) == p21.scale(-1 / th**2)


@pytest.mark.parametrize("theta", THETAS)
def test_orthogonality(theta):
    for n in range(1, 8):
        parts = partitions_of(n)
        J = {lam: jack_in_p_basis(lam, theta) for lam in parts}
        for i, lam in enumerate(parts):
            for mu in parts[i + 1:]:
                assert scalar_product(J[lam], J[mu], theta) == 0


@pytest.mark.parametrize("theta", THETAS)
def test_triangularity(theta):
    for n in range(1, 7):
        for lam in partitions_of(n):
            mono = to_monomial_basis(jack_in_p_basis(lam, theta))
            assert mono[lam] == 1
            assert all(reverse_lex_compare(mu, lam) <= 0 for mu in mono)


SPECS = [HomAlpha(F(2, 3), 2), HomAlpha(F(5, 4), 4), HomBeta(F(3, 5), 2), HomBeta(F(1, 3), 4), Plancherel(F(5, 7))]


@pytest.mark.parametrize("theta", [F(1, 2), F(1), F(2)])
def test_closed_products_match_gram_schmidt(theta):
    for n in range(7):
        for lam in partitions_of(n):
            J = jack_in_p_basis(lam, theta)
            b = dual_scale_factor(lam, theta)
            for rho in SPECS:
                v = specialize(J, rho, theta)
                assert eval_jack(lam, rho, theta) == v
                assert eval_jack(lam, rho, theta, dual=True) == v * b


@given(st.sampled_from([lam for n in range(7) for lam in partitions_of(n)]),
       st.sampled_from(THETAS), st.fractions(F(1, 5), F(5), max_denominator=9), st.integers(1, 4))
@settings(max_examples=60, deadline=None)
def test_beta_alpha_duality(lam, theta, a, N):
    # J_lam at N copies of beta_i = a/theta equals J~_{lam'} at a^N with parameter 1/theta
    assert eval_jack(lam, HomBeta(a, N), theta) == eval_jack(conjugate(lam), HomAlpha(a, N), 1 / theta, dual=True)


@given(st.sampled_from([lam for n in range(8) for lam in partitions_of(n)]), st.integers(1, 4))
def test_vanishing(lam, N):
    a, th = F(3, 2), F(2, 3)
    assert (eval_jack(lam, HomAlpha(a, N), th) == 0) == (lam.length() > N)
    assert (eval_jack(lam, HomBeta(a, N), th) == 0) == (lam.part(1) > N)


def test_float_inputs_give_floats():
    v = eval_jack((2, 1), HomAlpha(0.5, 3), 0.7)
    assert isinstance(v, float)
    assert v == pytest.approx(float(eval_jack((2, 1), HomAlpha(F(1, 2), 3), F(7, 10))), rel=1e-13)


def test_json_round_trip():
    J = jack_in_p_basis((3, 1), F(2, 5))
    assert SymFuncExpr.from_json(J.to_json()) == J

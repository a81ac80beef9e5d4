import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jackgas.ensemble import (
    CaseParams, ParameterError, box_multiplier_bound, build_model, log_interaction, log_pmf_unnormalized,
    normalization_closed_form, particles,
)
from jackgas.oracle import jack_measure_on_box
from jackgas.partitions import Partition, enumerate_box

DESK = {
    "I": dict(N=3, M=4, a=0.5, b=0.6),
    "II": dict(N=3, M=4, a=0.5, b=0.6),
    "III": dict(N=3, a=0.5, t=0.8),
    "IV": dict(N=2, M=3, a=0.5, b=0.6),
    "V": dict(N=2, a=0.5, t=0.8),
    "VI": dict(N=2, t1=0.5, t2=0.8),
}


def params(case, theta=1.0, **kw):
    return CaseParams(case, theta=theta, **{**DESK[case], **kw})


def test_logw_examples():
    m = build_model(CaseParams("II", theta=1.0, N=1, M=2, a=0.5, b=0.5))
    assert m.logw(0) == pytest.approx(-math.log(2))
    m = build_model(CaseParams("III", theta=1.0, N=1, a=2.0, t=1.0), unbounded=True)
    for x in range(5):
        assert m.logw(x) == pytest.approx(x * math.log(2) - math.lgamma(x + 1))
    for th in (0.5, 2.0):
        m = build_model(params("VI", theta=th))
        assert m.logw(0) == pytest.approx(-math.lgamma(th))


def test_box_shapes():
    assert build_model(params("II")).R == 4
    assert build_model(params("I"), unbounded=True).R is None
    m = build_model(params("IV", d=3))
    assert (m.K, m.R) == (6, 2)
    m = build_model(params("V", d=3))
    assert (m.K, m.R) == (6, 2)
    m = build_model(params("VI", d=3))
    assert (m.K, m.R) == (6, 6)


def test_log_interaction():
    assert log_interaction([3.0], 1.0) == 0
    assert log_interaction([2.0, 0.0], 1.0) == pytest.approx(math.log(4))
    assert log_interaction([1.5, 0.0], 0.5) == pytest.approx(math.log(1.5))


def test_normalization_examples():
    p = CaseParams("I", theta=1.0, N=1, M=1, a=0.5, b=0.5)
    assert normalization_closed_form(p) == pytest.approx(math.log(4 / 3))
    p = CaseParams("II", theta=0.7, N=2, M=3, a=1.0, b=0.5)
    assert normalization_closed_form(p) == pytest.approx(6 * math.log(1.5))


def test_parameter_errors():
    with pytest.raises(ParameterError):
        CaseParams("I", N=2, M=2, a=2.0, b=0.5)
    with pytest.raises(ParameterError):
        CaseParams("IV", N=2, M=2, a=1.0, b=1.0)
    with pytest.raises(ParameterError):
        CaseParams("VII")
    with pytest.raises(ParameterError):
        CaseParams("II", N=2, a=0.5, b=0.5)
    with pytest.raises(ParameterError):
        CaseParams.from_dict({"case": "II", "n": 3})


def test_config_round_trip():
    p = params("IV", theta=0.5, d=4)
    assert CaseParams.from_dict(p.to_dict()) == p


def test_case_ii_pmf_ratio_against_jack_measure():
    p = CaseParams("II", theta=F(1), N=2, M=2, a=F(1, 2), b=F(1, 2))
    model, states, probs = jack_measure_on_box(p)
    fm = build_model(CaseParams("II", theta=1.0, N=2, M=2, a=0.5, b=0.5))
    ref = log_pmf_unnormalized(fm, states[-1])
    for lam, q in zip(states, probs):
        ratio = math.exp(log_pmf_unnormalized(fm, lam) - ref)
        assert ratio == pytest.approx(float(q / probs[-1]), rel=1e-12)


def test_poisson_weights_single_site():
    p = CaseParams("III", theta=1.0, N=1, a=1.5, t=1.0)
    m = build_model(p, R=12)
    logs = [log_pmf_unnormalized(m, (k,) if k else ()) for k in range(13)]
    for k in range(12):
        assert logs[k + 1] - logs[k] == pytest.approx(math.log(1.5 / (k + 1)))


def test_empty_partition_is_staircase():
    m = build_model(params("V", theta=0.5))
    ell = particles((), m.K, m.theta)
    assert log_pmf_unnormalized(m, ()) == pytest.approx(log_interaction(ell, m.theta) + sum(m.logw(x) for x in ell))


def test_outside_box():
    with pytest.raises(ValueError):
        log_pmf_unnormalized(build_model(params("II")), (5,))


@pytest.mark.parametrize("case", list(DESK))
@pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
def test_weight_ratio_matches_logw(case, theta):
    m = build_model(params(case, theta=theta))
    rng = np.random.default_rng(0)
    top = m.R + (m.K - 1) * theta
    # admissible points: x and x - 1 inside the domain of the weight
    for base in rng.integers(1, m.R + 1, size=50):
        x = base + theta * rng.integers(0, m.K)
        if x > top:
            continue
        phip, phim = m.weight_ratio(x)
        assert math.exp(m.logw(x) - m.logw(x - 1)) == pytest.approx(phip / phim, rel=1e-10)


def test_wall_zeros():
    m = build_model(params("II"))
    assert m.weight_ratio(m.wall)[0] == pytest.approx(0, abs=1e-12)
    assert m.weight_ratio(0.0)[1] == 0
    assert build_model(params("I")).weight_ratio(0.0)[1] == 0


def test_case_iii_ratio_is_one_at_ast():
    p = CaseParams("III", theta=1.0, N=2, a=1.5, t=1.0)
    m = build_model(p)
    phip, phim = m.weight_ratio(1.5 * 2 * 1.0)
    assert phip / phim == pytest.approx(1.0)


@given(st.sampled_from(list(DESK)), st.sampled_from([0.5, 1.0, 2.0]))
@settings(max_examples=20, deadline=None)
def test_pmf_finite_on_box(case, theta):
    natural = build_model(params(case, theta=theta))
    R = min(3, natural.R)
    m = build_model(params(case, theta=theta), R=R)
    for lam in enumerate_box(m.K, R):
        assert math.isfinite(log_pmf_unnormalized(m, lam))


def test_case_i_swap_is_same_measure():
    a = CaseParams("I", theta=F(1, 2), N=3, M=2, a=F(1, 2), b=F(1, 3))
    b = CaseParams("I", theta=F(1, 2), N=2, M=3, a=F(1, 3), b=F(1, 2))
    _, sa, pa = jack_measure_on_box(a, R=3)
    _, sb, pb = jack_measure_on_box(b, R=3)
    assert dict(zip(sa, pa)) == dict(zip(sb, pb))


def test_default_box_multiplier():
    p = CaseParams("IV", theta=0.5, N=10, M=5, a=0.3, b=0.9)
    assert box_multiplier_bound(p) == pytest.approx(3.12287, rel=1e-5)
    assert p.box_multiplier() == 8
    assert CaseParams("VI", theta=2.0, N=3, t1=1.0, t2=1.0).box_multiplier() == 8

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from jackgas.asymptotics import (
    ContourError, clt_covariance, clt_covariance_series, edge_compare, edge_rate, edge_rate_integrand,
    edge_scale, endpoints, gbe_sample, global_energy, global_rate, rescaled_gbe_top, rescaled_top_particle, semicircle_cdf,
    semicircle_location, sqrt_branch,
)
from jackgas.ensemble import CaseParams
from jackgas.equilibrium import EquilibriumDensity

DESK = CaseParams("II", theta=1.0, N=200, M=300, a=0.7, b=0.7)


def test_sqrt_branch():
    alpha, beta = 0.3, 1.7
    z = 1e6
    assert sqrt_branch(z, alpha, beta).real == pytest.approx(z - (alpha + beta) / 2, rel=1e-6)
    v = sqrt_branch(-2.0, alpha, beta)
    assert v.real == pytest.approx(-math.sqrt(2.3 * 3.7)) and abs(v.imag) < 1e-15
    rng = np.random.default_rng(0)
    zs = rng.normal(size=200) * 3 + 1j * rng.normal(size=200) * 3
    w = sqrt_branch(zs, alpha, beta)
    assert np.allclose(w * w, (zs - alpha) * (zs - beta), atol=1e-12, rtol=1e-12)
    assert np.allclose(sqrt_branch(zs.conj(), alpha, beta), w.conj(), atol=1e-14)
    with pytest.raises(ValueError):
        sqrt_branch(1.0, alpha, beta)


def test_sqrt_branch_continuity_from_infinity():
    # follow the upper half plane from +infinity down to the real axis left of alpha
    alpha, beta = 0.3, 1.7
    path = np.linspace(0, math.pi, 2001)
    zs = 1.0 + 3.0 * np.exp(1j * path[:-1])
    vals = sqrt_branch(zs, alpha, beta)
    assert np.max(np.abs(np.diff(vals))) < 0.05
    assert vals[-1].real < 0


def test_covariance_examples():
    one, ident = [1.0], [0.0, 1.0]
    assert abs(clt_covariance(one, one, DESK).value) < 1e-12
    assert abs(clt_covariance(ident, one, DESK).value) < 1e-12
    alpha, beta = endpoints(DESK)
    c = clt_covariance(ident, ident, DESK)
    assert c.value == pytest.approx((beta - alpha) ** 2 / (16 * DESK.theta), abs=1e-10)
    assert c.value == pytest.approx(clt_covariance_series(ident, ident, alpha, beta, DESK.theta), abs=1e-8)


@pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
def test_contour_matches_series(theta):
    p = CaseParams("II", theta=theta, N=10, M=17, a=0.6, b=0.9)
    alpha, beta = endpoints(p)
    rng = np.random.default_rng(int(theta * 10))
    for _ in range(3):
        f, g = rng.normal(size=4), rng.normal(size=3)
        assert clt_covariance(f, g, p).value == pytest.approx(
            clt_covariance_series(f, g, alpha, beta, theta), abs=1e-8)


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=4), st.lists(st.floats(-2, 2), min_size=1, max_size=4),
       st.floats(-2, 2))
@settings(max_examples=25, deadline=None)
def test_covariance_symmetric_and_bilinear(f, g, c):
    p = CaseParams("II", theta=0.8, N=10, M=14, a=0.5, b=0.9)
    cfg = clt_covariance(f, g, p, nodes=512).value
    assert cfg == pytest.approx(clt_covariance(g, f, p, nodes=512).value, abs=1e-10)
    h = [0.3, -1.0, 0.5]
    n = max(len(f), len(h))
    fh = np.pad(f, (0, n - len(f))) + c * np.pad(h, (0, n - len(h)))
    lhs = clt_covariance(fh, g, p, nodes=512).value
    rhs = cfg + c * clt_covariance(h, g, p, nodes=512).value
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_node_doubling():
    f, g = [0.1, 1.0, -0.4, 0.2], [0.0, 0.5, 0.3]
    a = clt_covariance(f, g, DESK, nodes=2048).value
    b = clt_covariance(f, g, DESK, nodes=4096).value
    assert abs(a - b) <= 1e-8


def test_covariance_depends_only_on_endpoints():
    # both parameter sets have band [1/16, 25/16] at theta = 1
    p1 = CaseParams("II", theta=1.0, N=4, M=3, a=3.0, b=1.0)
    p2 = CaseParams("II", theta=1.0, N=7, M=4, a=7 / 9, b=1.0)
    assert endpoints(p1) == pytest.approx((1 / 16, 25 / 16))
    assert endpoints(p2) == pytest.approx((1 / 16, 25 / 16))
    f, g = [0.0, 1.0, 0.5, -0.2], [1.0, -1.0, 0.3]
    assert clt_covariance(f, g, p1).value == pytest.approx(clt_covariance(f, g, p2).value, abs=1e-9)


def test_degenerate_band_rejected():
    p = CaseParams("II", theta=1.0, N=1, M=1, a=1.0, b=1.0)
    alpha, beta = endpoints(p)
    assert alpha < beta
    with pytest.raises(ValueError):
        clt_covariance([0, 1], [0, 1], CaseParams("III", theta=1.0, N=2, a=1.0, t=1.0))


def test_edge_rate_examples():
    _, beta = endpoints(DESK)
    assert edge_rate(beta, DESK) == 0
    assert edge_rate(DESK.theta, DESK) == 0
    low = CaseParams("II", theta=1.0, N=10, M=4, a=0.8, b=0.8)  # m = 0.4 <= ab theta
    assert edge_rate(1.3, low) == 0
    with pytest.raises(ValueError):
        edge_rate(DESK.m + DESK.theta, DESK)
    with pytest.raises(ValueError):
        edge_rate(0.5, DESK)


def test_edge_rate_shape():
    _, beta = endpoints(DESK)
    top = DESK.m + DESK.theta
    grid = np.linspace(beta, top - 1e-9, 1000)
    vals = np.array([edge_rate(t, DESK) for t in grid])
    assert np.all(np.diff(vals) >= -1e-14)
    assert edge_rate(beta + 1e-6, DESK) < 1e-8
    h = 1e-5
    for t in (beta + 0.05, beta + 0.1, 0.5 * (beta + top)):
        fd = (edge_rate(t + h, DESK) - edge_rate(t - h, DESK)) / (2 * h)
        assert fd == pytest.approx(edge_rate_integrand(t, DESK), abs=1e-6)


def test_global_rate():
    mu = EquilibriumDensity(DESK)
    assert abs(global_rate(mu, DESK)) < 1e-12
    th = DESK.theta

    def flat(x):
        x = np.asarray(x)
        return np.where((x >= 0.2) & (x <= 0.2 + th), 1 / th, 0.0)

    assert global_rate(flat, DESK, cells=4000) > 0.01


def test_global_energy_domain_errors():
    with pytest.raises(ValueError):
        global_energy(lambda x: np.full_like(np.asarray(x), 3.0), DESK)
    with pytest.raises(ValueError):
        global_energy(lambda x: np.full_like(np.asarray(x), 0.1), DESK)


@pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
def test_stationarity(theta):
    p = CaseParams("II", theta=theta, N=10, M=15, a=0.7, b=0.7)
    mu = EquilibriumDensity(p)
    alpha, beta = mu.band_endpoints()
    w = 0.1 * (beta - alpha)
    c1, c2 = alpha + 0.3 * (beta - alpha), alpha + 0.7 * (beta - alpha)

    def bump(x, c):
        u = (np.asarray(x) - c) / w
        return np.where(np.abs(u) < 1, (1 - u * u) ** 2, 0.0)

    def pert(eps):
        return lambda x: mu(x) + eps * (bump(x, c1) - bump(x, c2))

    eps = 1e-3
    e0 = global_energy(mu, p)
    slope = (global_energy(pert(eps), p) - global_energy(pert(-eps), p)) / (2 * eps)
    assert abs(slope) <= 1e-4
    # second order: the energy rises on both sides
    assert global_energy(pert(eps), p) > e0 and global_energy(pert(-eps), p) > e0


def test_edge_scale_matches_density():
    mu = EquilibriumDensity(DESK)
    _, beta = endpoints(DESK)
    s = edge_scale(DESK)
    e = 1e-8
    assert mu(beta - e) / (s / math.pi * math.sqrt(e)) == pytest.approx(1, rel=1e-4)
    assert edge_scale(DESK, printed=True) == pytest.approx(s / math.sqrt(1 + DESK.ab))


def test_gbe_single_particle():
    rng = np.random.default_rng(1)
    for beta in (1.0, 2.0, 4.0):
        x = np.array([gbe_sample(1, beta, rng)[0] for _ in range(20000)])
        assert x.var() == pytest.approx(2 / beta, rel=0.04)
        assert abs(x.mean()) < 0.05


def test_gbe_semicircle():
    ev = gbe_sample(1000, 2.0, np.random.default_rng(2))
    assert np.all(np.diff(ev) <= 0)
    assert stats.kstest(ev, semicircle_cdf).statistic <= 0.03


def _dense_goe(N, rng):
    a = rng.normal(size=(N, N))
    h = (a + a.T) / 2
    # density exp(-N tr(H^2)/4): off-diagonal variance 1/N, diagonal 2/N
    return np.linalg.eigvalsh(h * math.sqrt(2 / N))


def test_tridiagonal_matches_dense_matrix():
    rng = np.random.default_rng(3)
    tri = np.concatenate([gbe_sample(100, 1.0, rng) for _ in range(200)])
    dense = np.concatenate([_dense_goe(100, rng) for _ in range(200)])
    assert stats.ks_2samp(tri, dense).statistic < 0.02
    top_tri = [gbe_sample(100, 1.0, rng)[0] for _ in range(400)]
    top_dense = [_dense_goe(100, rng)[-1] for _ in range(400)]
    assert stats.ks_2samp(top_tri, top_dense).pvalue > 1e-3


def test_small_beta_warns():
    with pytest.warns(UserWarning):
        gbe_sample(5, 0.5, np.random.default_rng(0))


def test_semicircle_locations():
    assert semicircle_location(500, 1000) == pytest.approx(0.0, abs=2e-3)
    assert semicircle_location(500, 1000) == pytest.approx(-semicircle_location(501, 1000), abs=1e-12)
    assert semicircle_location(1, 400) == pytest.approx(2 - (3 * math.pi / 4) ** (2 / 3) / 400 ** (2 / 3), abs=1e-3)


def test_edge_compare_identical_inputs():
    # feeding the rescaling's own preimage of a GbetaE sample gives KS 0
    rng = np.random.default_rng(4)
    N = DESK.N
    gbe = np.array([gbe_sample(N, 2.0, rng)[0] for _ in range(50)])
    tilde = rescaled_gbe_top(gbe[:, None], N)
    gamma = EquilibriumDensity(DESK).classical_location(1, N)
    top_ell = N * (gamma + tilde / (N * edge_scale(DESK)) ** (2 / 3))
    assert rescaled_top_particle(top_ell, DESK) == pytest.approx(tilde, abs=1e-9)
    assert edge_compare(top_ell, gbe, DESK) <= 1 / 50

"""Case II fluctuations: CLT covariance, edge and global rate functions, GbetaE edge.

All functions take Case II parameters and work in the particle coordinates
x = l/N on [0, m + theta].
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special, stats

from .ensemble import CaseParams
from .equilibrium import EquilibriumDensity, case_ii_endpoints


class ContourError(ValueError):
    pass


def _case_ii(p: CaseParams) -> CaseParams:
    if p.case != "II":
        raise ValueError("this quantity is defined for Case II only")
    return p


def endpoints(p: CaseParams) -> tuple[float, float]:
    p = _case_ii(p)
    return case_ii_endpoints(p.ab, p.m, p.theta)


def sqrt_branch(z, alpha: float, beta: float):
    """sqrt((z-alpha)(z-beta)) with its cut on [alpha, beta], ~ z at infinity."""
    z = np.asarray(z, dtype=complex)
    on_cut = (np.abs(z.imag) == 0) & (z.real >= alpha) & (z.real <= beta)
    if np.any(on_cut):
        raise ValueError("z lies on the branch cut")
    out = np.exp(0.5 * (np.log(z - alpha) + np.log(z - beta)))
    return out if out.ndim else complex(out)


# -- CLT covariance ------------------------------------------------------------


def _as_poly(f) -> np.ndarray:
    """Test functions are polynomials given by increasing coefficients."""
    if isinstance(f, np.polynomial.Polynomial):
        return f.coef.astype(float)
    return np.atleast_1d(np.asarray(f, dtype=float))


def _kernel(z, w, alpha, beta, theta):
    sz = sqrt_branch(z, alpha, beta)
    sw = sqrt_branch(w, alpha, beta)
    q = ((z - alpha) * (w - beta) + (w - alpha) * (z - beta)) / (2 * sz * sw)
    return (q - 1) / (2 * theta * (z - w) ** 2)


@dataclass
class CovarianceResult:
    value: float
    error_estimate: float
    nodes: int
    imag: float


def clt_covariance(f, g, p: CaseParams, nodes: int = 2048, check: bool = True) -> CovarianceResult:
    """Limit covariance of sum f(l_i/N) and sum g(l_i/N) by a double contour integral.

    Nested circles about the middle of [0, m + theta]; the trapezoid rule is
    spectrally accurate for these analytic integrands.  The error estimate is
    the change from the half-node rule.
    """
    p = _case_ii(p)
    alpha, beta = endpoints(p)
    if not beta > alpha:
        raise ContourError("degenerate band: alpha == beta")
    fc, gc = _as_poly(f), _as_poly(g)
    c = 0.5 * (p.m + p.theta)
    safe = p.m + p.theta
    r_in, r_out = 0.6 * safe, 0.9 * safe
    if not (r_in > c - alpha + 1e-9 and r_in > beta - c + 1e-9):
        raise ContourError("contour does not enclose the band")

    def rule(n):
        phi = 2 * math.pi * np.arange(n) / n
        e = np.exp(1j * phi)
        z = c + r_out * e
        w = c + r_in * e
        dz = 1j * r_out * e * (2 * math.pi / n)
        dw = 1j * r_in * e * (2 * math.pi / n)
        fz = np.polynomial.polynomial.polyval(z, fc) * dz
        gw = np.polynomial.polynomial.polyval(w, gc) * dw
        K = _kernel(z[:, None], w[None, :], alpha, beta, p.theta)
        return (fz @ K @ gw) / (2j * math.pi) ** 2

    full = rule(nodes)
    half = rule(nodes // 2)
    if check and abs(full.imag) > 1e-9 * max(1.0, abs(full.real)):
        raise ContourError(f"covariance has a large imaginary part {full.imag:g}")
    return CovarianceResult(float(full.real), float(abs(full - half)), nodes, float(full.imag))


def _branch_series(x: float, y: float, n: int) -> np.ndarray:
    """Coefficients of (1 - x u)^(1/2) (1 - y u)^(-1/2) in powers of u."""
    k = np.arange(n)
    s1 = special.binom(0.5, k) * (-x) ** k
    s2 = special.binom(-0.5, k) * (-y) ** k
    return np.convolve(s1, s2)[:n]


def clt_covariance_series(f, g, alpha: float, beta: float, theta: float) -> float:
    """Residue-at-infinity evaluation of the same covariance, a finite sum.

    With A = sqrt((z-alpha)/(z-beta)), B = sqrt((z-beta)/(z-alpha)) expanded in
    1/z, the covariance is (1/4 theta) sum_n n [F_A(n) G_B(n) + F_B(n) G_A(n)],
    F_X(n) = sum_p f_p x_{p-n},  G_Y(n) = sum_q g_q y_{q+n}.
    """
    fc, gc = _as_poly(f), _as_poly(g)
    df, dg = len(fc) - 1, len(gc) - 1
    n_terms = df + dg + 2
    A = _branch_series(alpha, beta, n_terms)
    B = _branch_series(beta, alpha, n_terms)
    total = 0.0
    for n in range(1, df + 1):
        FA = sum(fc[q] * A[q - n] for q in range(n, df + 1))
        FB = sum(fc[q] * B[q - n] for q in range(n, df + 1))
        GA = sum(gc[q] * A[q + n] for q in range(dg + 1))
        GB = sum(gc[q] * B[q + n] for q in range(dg + 1))
        total += n * (FA * GB + FB * GA)
    return total / (4 * theta)


# -- edge large deviations ------------------------------------------------------


def edge_rate_integrand(y: float, p: CaseParams) -> float:
    """2 log( (R(y) + (1+ab) sqrt((y-alpha)(y-beta))) / (2 sqrt(ab y (m+theta-y))) )."""
    ab, m, th = p.ab, p.m, p.theta
    alpha, beta = endpoints(p)
    s = math.sqrt(max((y - alpha) * (y - beta), 0.0))
    num = (1 - ab) * y + ab * m - th + (1 + ab) * s
    den = 2 * math.sqrt(ab * y * (m + th - y))
    return 2 * math.log(num / den)


def edge_rate_detail(t: float, p: CaseParams) -> tuple[float, float, int]:
    """(value, quadrature error estimate, integrand evaluations) of the edge rate."""
    p = _case_ii(p)
    th, m = p.theta, p.m
    if not th <= t < m + th:
        raise ValueError(f"t must lie in [theta, m + theta) = [{th}, {m + th})")
    if m <= p.ab * th:
        return 0.0, 0.0, 0
    _, beta = endpoints(p)
    if t <= beta:
        return 0.0, 0.0, 0
    val, err, info = integrate.quad(edge_rate_integrand, beta, t, args=(p,), epsabs=1e-14,
                                    epsrel=1e-13, limit=200, full_output=True)[:3]
    return val, err, int(info["neval"])


def edge_rate(t: float, p: CaseParams) -> float:
    """Rate for the top particle l_1/N to sit at t (zero at and below beta)."""
    return edge_rate_detail(t, p)[0]


# -- global energy --------------------------------------------------------------


def potential(x, p: CaseParams):
    """V(x) = x log x + (m+theta-x) log(m+theta-x) - x log(ab)."""
    x = np.asarray(x, dtype=float)
    top = p.m + p.theta
    return special.xlogy(x, x) + special.xlogy(top - x, top - x) - x * math.log(p.ab)


def _log_cell_table(h: float, n: int) -> np.ndarray:
    """I_k = int over two width-h cells k apart of log|x - y|."""
    def G(u):
        return special.xlogy(u * u / 2, np.abs(u)) - 0.75 * u * u
    k = np.arange(n, dtype=float)
    return G((k + 1) * h) + G((k - 1) * h) - 2 * G(k * h)


def _cell_masses(density: Callable, lo: float, hi: float, cells: int, order: int = 6):
    x, wts = np.polynomial.legendre.leggauss(order)
    h = (hi - lo) / cells
    left = lo + h * np.arange(cells)
    pts = left[:, None] + 0.5 * h * (x[None, :] + 1)
    vals = np.asarray(density(pts.ravel()), dtype=float).reshape(pts.shape)
    return pts, 0.5 * h * wts[None, :], vals


def global_energy(density: Callable, p: CaseParams, cells: int = 4000, literal_potential: bool = False,
                  tol: float = 1e-6, mass_tol: float = 1e-4) -> float:
    """E(mu) = int int log|x-y|^{-1} dmu dmu + int U dmu on [0, m+theta].

    The log kernel is integrated exactly over pairs of cells against the
    cellwise-constant density (which also handles the diagonal).  U is V/theta,
    the potential the Case II equilibrium measure actually minimizes against;
    ``literal_potential`` uses V itself.  ``mass_tol`` is loose because square
    root edges limit the cell quadrature to about h^1.5.
    """
    p = _case_ii(p)
    th = p.theta
    top = p.m + th
    pts, wts, vals = _cell_masses(density, 0.0, top, cells)
    if np.any(vals < -tol) or np.any(vals > 1 / th + tol):
        raise ValueError("density must lie in [0, 1/theta]")
    masses = (vals * wts).sum(axis=1)
    total = masses.sum()
    if abs(total - 1) > mass_tol:
        raise ValueError(f"density has mass {total}, expected 1")
    h = top / cells
    rho = masses / h
    table = _log_cell_table(h, cells)
    conv = np.convolve(rho, np.concatenate([table[:0:-1], table]), mode="valid")
    log_term = -float(rho @ conv)
    U = potential(pts, p)
    if not literal_potential:
        U = U / th
    return log_term + float((vals * wts * U).sum())


def global_rate(density: Callable, p: CaseParams, cells: int = 4000) -> float:
    """theta (E(mu) - E(mu^II))."""
    mu = EquilibriumDensity(p)
    return p.theta * (global_energy(density, p, cells) - global_energy(mu, p, cells))


# -- edge quantities and GbetaE ---------------------------------------------------


def edge_scale(p: CaseParams, printed: bool = False) -> float:
    """s_B with mu^II(x) ~ (s_B/pi) sqrt(beta - x) near the right band edge.

    Expanding the arccos density at beta gives the factor (1+ab) sqrt(beta-alpha);
    ``printed=True`` returns the variant sqrt((1+ab)(beta-alpha)) instead.
    """
    p = _case_ii(p)
    ab, m, th = p.ab, p.m, p.theta
    alpha, beta = endpoints(p)
    den = 2 * th * math.sqrt(ab * beta * (m + th - beta))
    if printed:
        return math.sqrt((1 + ab) * (beta - alpha)) / den
    return (1 + ab) * math.sqrt(beta - alpha) / den


def semicircle_cdf(x):
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    return 0.5 + (x * np.sqrt(4 - x * x) / 2 + 2 * np.arcsin(x / 2)) / (2 * math.pi)


def semicircle_location(m: int, N: int) -> float:
    """gamma^sc_{m,N}: (m - 1/2)/N of the semicircle mass lies above it."""
    from scipy.optimize import brentq
    q = 1 - (m - 0.5) / N
    return brentq(lambda x: semicircle_cdf(x) - q, -2.0, 2.0, xtol=1e-15)


def gbe_sample(N: int, beta: float, rng: np.random.Generator) -> np.ndarray:
    """Eigenvalues (decreasing) with density prop. to prod|x_i-x_j|^beta exp(-N beta sum x^2/4).

    Tridiagonal model: diagonal N(0, 2), off-diagonal chi_{beta k}, k = N-1..1;
    dividing by sqrt(N beta) gives the normalization above.
    """
    if beta < 1:
        warnings.warn("beta < 1: outside the range of the edge comparison", stacklevel=2)
    from scipy.linalg import eigvalsh_tridiagonal
    diag = rng.normal(0.0, math.sqrt(2.0), size=N)
    off = np.sqrt(rng.chisquare(beta * np.arange(N - 1, 0, -1))) if N > 1 else np.zeros(0)
    ev = eigvalsh_tridiagonal(diag, off) / math.sqrt(N * beta)
    return ev[::-1]


def rescaled_gbe_top(samples: np.ndarray, N: int) -> np.ndarray:
    """N^{2/3} (X_1 - gamma^sc_{1,N}) for each sample (rows of decreasing eigenvalues)."""
    return N ** (2 / 3) * (np.asarray(samples)[:, 0] - semicircle_location(1, N))


def rescaled_top_particle(top_ell: np.ndarray, p: CaseParams) -> np.ndarray:
    """(N s_B)^{2/3} (l_1/N - gamma^II_{1,N})."""
    N = p.N
    gamma = EquilibriumDensity(p).classical_location(1, N)
    return (N * edge_scale(p)) ** (2 / 3) * (np.asarray(top_ell, dtype=float) / N - gamma)


def edge_compare(top_ell: Sequence[float], gbe_top: Sequence[float], p: CaseParams) -> float:
    """KS distance between the rescaled top particle and the rescaled GbetaE top eigenvalue."""
    a = rescaled_top_particle(np.asarray(top_ell), p)
    b = rescaled_gbe_top(np.asarray(gbe_top)[:, None], p.N) if np.ndim(gbe_top) == 1 else rescaled_gbe_top(gbe_top, p.N)
    return float(stats.ks_2samp(a, b).statistic)

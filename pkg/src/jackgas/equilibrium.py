"""Limit densities of the six ensembles.

In particle coordinates x = l/K the limit measure has density

    mu(x) = (1/(theta pi)) arccos_trunc( R(x) / (2 sqrt(Phi-(x) Phi+(x))) )

on (0, right edge), where Phi-pair are the limits of the site-weight ratio
and R = Phi- exp(-theta G) + Phi+ exp(theta G) is a polynomial.  The
nu-densities live in the shifted coordinates Z_i/N, Z_i = lam_i - i theta,
and carry a saturated left tail at level 1/theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate, optimize

from .ensemble import CaseParams, ParameterError, box_multiplier_bound, default_cutoff

VOID, BAND, SATURATED = "void", "band", "saturated"


def truncated_arccos(x):
    """arccos on [-1, 1], pi below -1 and 0 above 1."""
    return np.arccos(np.clip(x, -1.0, 1.0))


# -- Phi pair and R ------------------------------------------------------------


def phi_limits(p: CaseParams) -> tuple[Polynomial, Polynomial]:
    """(Phi-, Phi+) in the coordinates x = l/K."""
    p = p.canonical()
    th, c = p.theta, p.case
    z = Polynomial([0.0, 1.0])
    if c == "I":
        ab, m = p.ab, p.m
        return z, Polynomial([ab * th * (m - 1), ab])
    if c == "II":
        ab, m = p.ab, p.m
        return z, Polynomial([ab * (m + th), -ab])
    if c == "III":
        return z, Polynomial([p.a * p.t * th])
    d = p.box_multiplier()
    if c == "IV":
        ab, m = p.ab, p.m
        return z**2, ab * Polynomial([1 / d + th, -1.0]) * Polynomial([m / d + th, -1.0])
    if c == "V":
        at = p.a * p.t
        return z**2, (at * th / d) * Polynomial([th + 1 / d, -1.0])
    return z**2, Polynomial([p.t1 * p.t2 * th**2 / d**2])


def first_moment_closed(p: CaseParams) -> float:
    """int x mu(dx) from E|lam| in the degree-two cases."""
    p = p.canonical()
    th, c = p.theta, p.case
    if c not in ("IV", "V", "VI"):
        raise ValueError("closed first moment is only needed for cases IV-VI")
    d = p.box_multiplier()
    if c == "IV":
        return p.ab * p.m / ((1 - p.ab) * d**2 * th) + th / 2
    if c == "V":
        return p.a * p.t / d**2 + th / 2
    return p.t1 * p.t2 * th / d**2 + th / 2


def r_mu(p: CaseParams) -> Polynomial:
    """Polynomial part at infinity of Phi- e^{-theta G} + Phi+ e^{theta G}.

    G = 1/z + m1/z^2 + ..., so only the mass (degree-one cases) and the first
    moment (degree-two cases) enter.
    """
    phim, phip = phi_limits(p)
    deg = max(phim.degree(), phip.degree())
    m1 = first_moment_closed(p) if deg >= 2 else 0.0
    th = p.theta
    out = np.zeros(deg + 1)
    for sign, phi in ((-1.0, phim), (1.0, phip)):
        # exp(s theta (w + m1 w^2)) = 1 + s theta w + (theta^2/2 + s theta m1) w^2 + ...
        e = [1.0, sign * th, th**2 / 2 + sign * th * m1][: deg + 1]
        coef = np.zeros(deg + 1)
        coef[: len(phi.coef)] = phi.coef
        for n in range(deg + 1):
            out[n] += sum(coef[n + k] * e[k] for k in range(len(e)) if n + k <= deg)
    return Polynomial(out)


def r_mu_reference(p: CaseParams) -> Polynomial:
    """The six R polynomials written out directly."""
    p = p.canonical()
    th, c = p.theta, p.case
    if c == "I":
        return Polynomial([th * (p.ab * p.m - 1), 1 + p.ab])
    if c == "II":
        return Polynomial([p.ab * p.m - th, 1 - p.ab])
    if c == "III":
        return Polynomial([p.a * p.t * th - th, 1.0])
    d = p.box_multiplier()
    if c == "IV":
        ab, m = p.ab, p.m
        return Polynomial([0.0, -(th + ab * ((m + 1) / d + th)), 1 + ab])
    if c == "V":
        return Polynomial([0.0, -th - p.a * p.t * th / d, 1.0])
    return Polynomial([0.0, -th, 1.0])


def right_edge(p: CaseParams) -> float:
    """Right end of the particle interval in l/K coordinates."""
    p = p.canonical()
    th, c = p.theta, p.case
    if c in ("I", "III"):
        cut = p.cutoff if p.cutoff is not None else default_cutoff(p)
        return cut + th
    if c == "II":
        return p.m + th
    d = p.box_multiplier()
    if c == "IV":
        return min(1.0, p.m) / d + th
    if c == "V":
        return 1 / d + th
    return 1.0 + th


# -- the density object -------------------------------------------------------


@dataclass(frozen=True)
class Region:
    lo: float
    hi: float
    kind: str


class EquilibriumDensity:
    """Closed-form limit density for one parameter set."""

    def __init__(self, p: CaseParams, nodes: int = 4001):
        self.params = p.canonical()
        if p.case in ("IV", "V", "VI") and p.box_multiplier() < box_multiplier_bound(p) - 1e-12:
            raise ParameterError(f"d = {p.d} is below the bound {box_multiplier_bound(p):.6g}; "
                                 "the limit density needs a larger box")
        self.theta = float(self.params.theta)
        self.phim, self.phip = phi_limits(self.params)
        self.R = r_mu(self.params)
        self.left = 0.0
        self.right = right_edge(self.params)
        self._nodes = nodes

    # pointwise
    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.left) & (x < self.right)
        xs = np.where(inside, x, 0.5 * (self.left + self.right))
        pp = self.phim(xs) * self.phip(xs)
        with np.errstate(divide="ignore", invalid="ignore"):
            arg = self.R(xs) / (2 * np.sqrt(pp))
        val = truncated_arccos(arg) / (self.theta * math.pi)
        out = np.where(inside, val, 0.0)
        # closed endpoints take the level of the adjacent region
        sat = 1.0 / self.theta
        out = np.where(x == self.left, sat if self.regions[0].kind == SATURATED else 0.0, out)
        out = np.where(x == self.right, sat if self.regions[-1].kind == SATURATED else 0.0, out)
        return out if out.ndim else float(out)

    @cached_property
    def regions(self) -> tuple[Region, ...]:
        disc = self.R**2 - 4 * self.phim * self.phip
        roots = [r.real for r in disc.roots() if abs(r.imag) < 1e-9 * max(1.0, abs(r))]
        # roundoff splits the double root at 0 of the degree-two cases; drop such slivers
        eps = 1e-10 * (self.right - self.left)
        cuts = sorted({r for r in roots if self.left + eps < r < self.right - eps})
        pts = [self.left] + cuts + [self.right]
        out: list[Region] = []
        for lo, hi in zip(pts[:-1], pts[1:]):
            mid = 0.5 * (lo + hi)
            if disc(mid) < 0:
                kind = BAND
            elif self.R(mid) > 0:
                kind = VOID
            else:
                kind = SATURATED
            if out and out[-1].kind == kind:
                out[-1] = Region(out[-1].lo, hi, kind)
            else:
                out.append(Region(lo, hi, kind))
        return tuple(out)

    @property
    def degenerate(self) -> bool:
        """Case II boundary parameters (ab m = theta or m <= ab theta), where edge results do not apply."""
        q = self.params
        if q.case != "II":
            return False
        return math.isclose(q.ab * q.m, self.theta, rel_tol=1e-12) or q.m <= q.ab * self.theta

    @property
    def bands(self) -> list[tuple[float, float]]:
        return [(r.lo, r.hi) for r in self.regions if r.kind == BAND]

    def band_endpoints(self) -> tuple[float, float]:
        b = self.bands
        if len(b) != 1:
            raise ValueError(f"expected a single band, found {len(b)}")
        return b[0]

    # integrals
    def _band_table(self, lo, hi):
        phi = np.linspace(0.0, math.pi, self._nodes)
        x = 0.5 * (lo + hi) - 0.5 * (hi - lo) * np.cos(phi)
        g = self(x) * 0.5 * (hi - lo) * np.sin(phi)
        cum = integrate.cumulative_simpson(g, x=phi, initial=0.0)
        return x, cum

    @cached_property
    def _cdf_table(self):
        xs, cs = [np.array([self.left])], [np.array([0.0])]
        acc = 0.0
        for r in self.regions:
            if r.kind == BAND:
                x, cum = self._band_table(r.lo, r.hi)
                xs.append(x[1:])
                cs.append(acc + cum[1:])
                acc += cum[-1]
            else:
                acc += (r.hi - r.lo) / self.theta if r.kind == SATURATED else 0.0
                xs.append(np.array([r.hi]))
                cs.append(np.array([acc]))
        return np.concatenate(xs), np.concatenate(cs)

    def cdf(self, x):
        xt, ct = self._cdf_table
        return np.interp(x, xt, ct, left=0.0, right=ct[-1])

    def mass(self) -> float:
        total = 0.0
        for r in self.regions:
            if r.kind == SATURATED:
                total += (r.hi - r.lo) / self.theta
            elif r.kind == BAND:
                total += self._band_quad(r, lambda x: 1.0)
        return total

    def _band_quad(self, r: Region, f) -> float:
        c, h = 0.5 * (r.lo + r.hi), 0.5 * (r.hi - r.lo)

        def g(phi):
            x = c - h * math.cos(phi)
            return self(x) * f(x) * h * math.sin(phi)

        return integrate.quad(g, 0.0, math.pi, epsabs=1e-14, epsrel=1e-13, limit=200)[0]

    def moment(self, k: int) -> float:
        total = 0.0
        for r in self.regions:
            if r.kind == SATURATED:
                total += (r.hi ** (k + 1) - r.lo ** (k + 1)) / ((k + 1) * self.theta)
            elif r.kind == BAND:
                total += self._band_quad(r, lambda x: x**k)
        return total

    def quantile(self, q: float) -> float:
        """Smallest x with cdf(x) = q."""
        if not 0 < q < 1:
            raise ValueError("quantile level must lie in (0, 1)")
        lo, hi = self.left, self.right
        return optimize.brentq(lambda x: self.cdf(x) - q, lo, hi, xtol=1e-14)

    def classical_location(self, m: int, N: int) -> float:
        """gamma_{m,N} with (m - 1/2)/N = mu([gamma, inf))."""
        return self.quantile(1 - (m - 0.5) / N)

    def stieltjes(self, z: complex) -> complex:
        """G(z) = int mu(dx)/(z - x) for z off the support."""
        z = complex(z)
        for r in self.regions:
            if r.kind != VOID and abs(z.imag) < 1e-14 and r.lo <= z.real <= r.hi:
                raise ValueError("z lies on the support")
        total = 0j
        for r in self.regions:
            if r.kind == SATURATED:
                total += (np.log(z - r.lo) - np.log(z - r.hi)) / self.theta
            elif r.kind == BAND:
                c, h = 0.5 * (r.lo + r.hi), 0.5 * (r.hi - r.lo)

                def g(phi):
                    x = c - h * math.cos(phi)
                    return self(x) * h * math.sin(phi) / (z - x)

                total += integrate.quad(g, 0.0, math.pi, complex_func=True,
                                        epsabs=1e-14, epsrel=1e-13, limit=400)[0]
        return complex(total)

    def loop_residual(self, z: complex) -> complex:
        """Phi- e^{-theta G} + Phi+ e^{theta G} - R at z."""
        G = self.stieltjes(z)
        th = self.theta
        return self.phim(z) * np.exp(-th * G) + self.phip(z) * np.exp(th * G) - self.R(z)

    def q_mu(self, z: complex) -> complex:
        G = self.stieltjes(z)
        th = self.theta
        return self.phim(z) * np.exp(-th * G) - self.phip(z) * np.exp(th * G)


def equilibrium_density(p: CaseParams, x):
    return EquilibriumDensity(p)(x)


def band_endpoints(p: CaseParams):
    """(alpha, beta) of the band together with the labelled regions."""
    mu = EquilibriumDensity(p)
    return mu.band_endpoints(), mu.regions


def case_ii_endpoints(ab: float, m: float, theta: float) -> tuple[float, float]:
    r = 2 * math.sqrt(ab * m * theta)
    return (ab * m + theta - r) / (1 + ab), (ab * m + theta + r) / (1 + ab)


# -- nu densities ------------------------------------------------------------


def nu_density(p: CaseParams, x):
    """Density of the limit of (1/N) sum delta(Z_i/N), Z_i = lam_i - i theta."""
    x = np.asarray(x, dtype=float)
    th, c = float(p.theta), p.case
    sat = 1.0 / th

    def arc(num, den2, mask):
        with np.errstate(divide="ignore", invalid="ignore"):
            v = truncated_arccos(num / (2 * np.sqrt(np.where(mask, den2, 1.0)))) / (th * math.pi)
        return v

    if c == "I":
        ab, m = p.ab, p.M / p.N
        lo = -th * min(m, 1.0)
        inside = x > lo
        val = arc((1 + ab) * x + ab * th * (m + 1), ab * (x + th) * (x + m * th), inside)
        out = np.where(inside, val, sat)
    elif c == "II":
        ab, m = p.ab, p.M / p.N
        inside = (x > -th) & (x < m)
        val = arc((1 - ab) * x + ab * (m - th), ab * (x + th) * (m - x), inside)
        out = np.where(x >= m, 0.0, np.where(inside, val, sat))
    elif c == "III":
        q = p.a * p.t * th
        inside = x > -th
        val = arc(x + q, q * (x + th), inside)
        out = np.where(inside, val, sat)
    elif c == "IV":
        ab, m = p.ab, p.M / p.N
        alpha = (ab * (m + 1) + 2 * math.sqrt(ab * m)) / (1 - ab)
        top = min(m, 1.0)
        inside = (x > -alpha) & (x < top)
        val = arc((1 + ab) * x - ab * (m + 1), ab * (1 - x) * (m - x), inside)
        out = np.where(x >= top, 0.0, np.where(inside, val, sat))
    elif c == "V":
        q = p.a * p.t * th
        alpha = q + 2 * math.sqrt(q)
        inside = (x > -alpha) & (x < 1)
        val = arc(x - q, q * (1 - x), inside)
        out = np.where(x >= 1, 0.0, np.where(inside, val, sat))
    else:
        w = 2 * th * math.sqrt(p.t1 * p.t2)
        inside = (x >= -w) & (x <= w)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = truncated_arccos(x / w) / (th * math.pi)
        out = np.where(x > w, 0.0, np.where(inside, val, sat))
    return out if out.ndim else float(out)

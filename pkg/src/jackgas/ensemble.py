"""The six homogeneous Jack-measure families written as discrete beta-ensembles.

A state is a partition lam in the K x R box, or equivalently the particle
configuration l_i = lam_i + (K - i) theta.  The unnormalized law is

    prod_{i<j} G(l_i - l_j) * prod_i w(l_i; K),
    G(d) = Gamma(d+1) Gamma(d+theta) / (Gamma(d) Gamma(d+1-theta)).

Every site weight satisfies w(x)/w(x-1) = Phi+(x)/Phi-(x) with polynomial
Phi-pair, which is what the sampler and the loop equations use.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from math import lgamma, log
from typing import Callable, Optional

import numpy as np

from .partitions import Partition

CASES = ("I", "II", "III", "IV", "V", "VI")


class ParameterError(ValueError):
    """Case parameters outside the admissible range."""


@dataclass(frozen=True)
class CaseParams:
    """Parameters of one of the six homogeneous cases.

    ``a, b`` enter Cases I, II, IV; ``t`` Cases III, V; ``t1, t2`` Case VI.
    ``M`` is explicit and the ratio m = M/N is derived.  ``d`` is the box
    multiplier of Cases IV-VI and ``cutoff`` (a multiple of N) bounds the
    parts in the unbounded Cases I and III; both get defaults when None.
    """

    case: str
    theta: float = 1.0
    N: int = 1
    M: Optional[int] = None
    a: Optional[float] = None
    b: Optional[float] = None
    t: Optional[float] = None
    t1: Optional[float] = None
    t2: Optional[float] = None
    d: Optional[int] = None
    cutoff: Optional[float] = None

    def __post_init__(self):
        if self.case not in CASES:
            raise ParameterError(f"unknown case {self.case!r}")
        if not self.theta > 0:
            raise ParameterError("theta must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise ParameterError("N must be a positive integer")
        need = {
            "I": ("a", "b", "M"), "II": ("a", "b", "M"), "III": ("a", "t"),
            "IV": ("a", "b", "M"), "V": ("a", "t"), "VI": ("t1", "t2"),
        }[self.case]
        for name in need:
            v = getattr(self, name)
            if v is None or not v > 0:
                raise ParameterError(f"case {self.case} needs positive {name}")
        if self.M is not None and int(self.M) != self.M:
            raise ParameterError("M must be an integer")
        if self.case in ("I", "IV") and not self.a * self.b < 1:
            raise ParameterError(f"case {self.case} requires ab < 1")
        if self.d is not None and (int(self.d) != self.d or self.d < 1):
            raise ParameterError("d must be a positive integer")

    @property
    def m(self) -> float:
        return self.M / self.N

    @property
    def ab(self) -> float:
        return self.a * self.b

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, data: dict) -> "CaseParams":
        allowed = set(cls.__dataclass_fields__)
        unknown = set(data) - allowed
        if unknown:
            raise ParameterError(f"unknown parameter(s): {sorted(unknown)}")
        return cls(**data)

    def canonical(self) -> "CaseParams":
        """Case I with M < N is the same measure with (a, N) and (b, M) swapped."""
        if self.case == "I" and self.M < self.N:
            return replace(self, a=self.b, b=self.a, N=self.M, M=self.N)
        return self

    def box_multiplier(self) -> int:
        if self.d is not None:
            return int(self.d)
        return default_box_multiplier(self)


def box_multiplier_bound(p: CaseParams) -> float:
    """Lower bound on d keeping the band of Cases IV-VI inside the box."""
    th = p.theta
    if p.case == "IV":
        ab, m = p.ab, p.m
        return (ab * (m + 1) + 2 * math.sqrt(ab * m)) / (1 - ab) / th
    if p.case == "V":
        at = p.a * p.t
        return (at * th + 2 * math.sqrt(at * th)) / th
    if p.case == "VI":
        r = math.sqrt(p.t1 * p.t2)
        return max(2 * r, 2 * th * r)
    raise ParameterError("the box multiplier applies to cases IV-VI only")


def default_box_multiplier(p: CaseParams) -> int:
    """Twice the smallest admissible integer d (at least 1 before doubling)."""
    if p.case not in ("IV", "V", "VI"):
        return 1
    return 2 * max(1, math.ceil(box_multiplier_bound(p) - 1e-12))


def default_cutoff(p: CaseParams) -> float:
    """Cutoff multiple c (parts <= c N) for the unbounded Cases I and III."""
    th = p.theta
    if p.case == "I":
        q = p.canonical()
        return 2 * th * (1 + math.sqrt(q.ab * q.m)) ** 2 / (1 - q.ab)
    if p.case == "III":
        return 2 * 2 * (p.a * p.t + 1) * th
    raise ParameterError("cutoff applies to cases I and III only")


# -- log-Gamma primitives ----------------------------------------------------


def _pair_log(d: float, theta: float) -> float:
    return lgamma(d + 1) + lgamma(d + theta) - lgamma(d) - lgamma(d + 1 - theta)


def log_interaction(ell, theta: float) -> float:
    """Sum over i < j of log G(l_i - l_j)."""
    ell = list(ell)
    total = 0.0
    for i in range(len(ell)):
        for j in range(i + 1, len(ell)):
            total += _pair_log(ell[i] - ell[j], theta)
    return total


def particles(lam, K: int, theta: float) -> np.ndarray:
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    parts = np.array(lam.padded(K), dtype=float)
    return parts + theta * np.arange(K - 1, -1, -1, dtype=float)


# -- the model ---------------------------------------------------------------


@dataclass(frozen=True)
class EnsembleModel:
    """K particles, parts bounded by R (None = unbounded), site log-weight."""

    params: CaseParams
    K: int
    R: Optional[int]
    theta: float
    logw: Callable[[float], float] = field(repr=False, compare=False)
    phi_minus: tuple = ()
    phi_plus: tuple = ()

    def weight_ratio(self, x: float) -> tuple[float, float]:
        """(Phi+(x), Phi-(x)) with w(x)/w(x-1) = Phi+(x)/Phi-(x)."""
        return _horner(self.phi_plus, x), _horner(self.phi_minus, x)

    @property
    def wall(self) -> Optional[float]:
        """s_K = R + 1 + (K-1) theta, the first site beyond the box."""
        return None if self.R is None else self.R + 1 + (self.K - 1) * self.theta

    def contains(self, lam) -> bool:
        lam = lam if isinstance(lam, Partition) else Partition(lam)
        return lam.length() <= self.K and (self.R is None or lam.part(1) <= self.R)


def _horner(coeffs, x):
    """Evaluate a polynomial given by increasing-degree coefficients."""
    out = 0.0
    for c in reversed(coeffs):
        out = out * x + c
    return out


def _poly_mul(p, q):
    out = [0.0] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return tuple(out)


def build_model(p: CaseParams, R: Optional[int] = None, unbounded: bool = False) -> EnsembleModel:
    """Beta-ensemble for the given case.

    ``R`` overrides the default box bound.  For Cases I and III the default
    is the cutoff ceil(c N); ``unbounded=True`` keeps R = None instead.
    """
    p = p.canonical()
    th = float(p.theta)
    N = p.N
    c = p.case

    if c in ("I", "II"):
        ab, M = p.ab, p.M
    if c == "I":
        K = min(N, M)
        cM, cN = (M - K + 1) * th, (N - K + 1) * th

        def logw(x):
            return x * log(ab) + lgamma(cM + x) + lgamma(cN + x) - lgamma(x + 1) - lgamma(x + th)

        if K == N:
            # Gamma(theta + x) cancels against Gamma(x + theta)
            phim, phip = (0.0, 1.0), (ab * (cM - 1), ab)
        else:
            phim = (0.0, th - 1, 1.0)
            phip = tuple(ab * v for v in _poly_mul((cM - 1, 1.0), (cN - 1, 1.0)))
        Rdef = None
    elif c == "II":
        K, Rdef = N, M
        top = M + N * th + 1 - th

        def logw(x):
            return x * log(ab) - lgamma(x + 1) - lgamma(top - x)

        phim, phip = (0.0, 1.0), (ab * top, -ab)
    elif c == "III":
        K, Rdef = N, None
        q = p.a * N * p.t * th

        def logw(x):
            return x * log(q) - lgamma(x + 1)

        phim, phip = (0.0, 1.0), (q,)
    else:
        d = p.box_multiplier()
        K = N * d
        phim = (0.0, th - 1, 1.0)
        if c == "IV":
            ab, M = p.ab, p.M
            Rdef = min(M, N)
            tN, tM = N + K * th + 1 - th, M + K * th + 1 - th

            def logw(x):
                return (x * log(ab) - lgamma(x + 1) - lgamma(x + th)
                        - lgamma(tN - x) - lgamma(tM - x))

            phip = tuple(ab * v for v in _poly_mul((tN, -1.0), (tM, -1.0)))
        elif c == "V":
            Rdef = N
            q = p.a * N * p.t * th
            tN = N + K * th + 1 - th

            def logw(x):
                return x * log(q) - lgamma(x + 1) - lgamma(x + th) - lgamma(tN - x)

            phip = (q * tN, -q)
        else:
            Rdef = K
            q = N * p.t1 * N * p.t2 * th * th

            def logw(x):
                return x * log(q) - lgamma(x + 1) - lgamma(x + th)

            phip = (q,)

    if R is None and Rdef is None and not unbounded:
        R = math.ceil((p.cutoff if p.cutoff is not None else default_cutoff(p)) * N)
    elif R is None:
        R = Rdef
    return EnsembleModel(params=p, K=K, R=R, theta=th, logw=logw, phi_minus=phim, phi_plus=phip)


def log_pmf_unnormalized(model: EnsembleModel, lam) -> float:
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    if not model.contains(lam):
        raise ValueError(f"{lam} lies outside the {model.K} x {model.R} box")
    ell = particles(lam, model.K, model.theta)
    return log_interaction(ell, model.theta) + sum(model.logw(x) for x in ell)


def normalization_closed_form(p: CaseParams) -> float:
    """log H_theta(rho1; rho2) for the case's pair of specializations."""
    th, N = p.theta, p.N
    c = p.case
    if c == "I":
        return -th * N * p.M * math.log1p(-p.ab)
    if c == "II":
        return N * p.M * math.log1p(p.ab)
    if c == "III":
        return th * p.a * N * (N * p.t)
    if c == "IV":
        return -N * p.M * math.log1p(-p.ab) / th
    if c == "V":
        return p.a * N * (N * p.t)
    return th * (N * p.t1) * (N * p.t2)


def specializations(p: CaseParams, exact: bool = False):
    """The pair (rho1, rho2) whose Jack measure the case describes."""
    from fractions import Fraction

    from .jack import HomAlpha, HomBeta, Plancherel

    conv = (lambda v: Fraction(v)) if exact else (lambda v: v)
    N = p.N
    c = p.case
    if c == "I":
        return HomAlpha(conv(p.a), N), HomAlpha(conv(p.b), p.M)
    if c == "II":
        return HomAlpha(conv(p.a), N), HomBeta(conv(p.b), p.M)
    if c == "III":
        return HomAlpha(conv(p.a), N), Plancherel(N * conv(p.t))
    if c == "IV":
        return HomBeta(conv(p.a), N), HomBeta(conv(p.b), p.M)
    if c == "V":
        return HomBeta(conv(p.a), N), Plancherel(N * conv(p.t))
    return Plancherel(N * conv(p.t1)), Plancherel(N * conv(p.t2))
